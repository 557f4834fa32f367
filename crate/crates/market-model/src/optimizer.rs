//! Derivative-free global maximization of the profit functionals.
//!
//! The profit landscapes are smooth but multimodal (two buyer groups give
//! two competing quality peaks), so every search is grid-bracketed before a
//! golden-section refinement. Multi-variant problems run multi-start cyclic
//! coordinate ascent from a fixed lattice; displays with more than four
//! variants use the two-level structure (duplicated low quality plus one
//! premium level) that the unconstrained optimizer itself settles into.
//! All searches are deterministic: fixed lattices, fixed sweep order, and
//! ordered reductions.

use crate::error::{ModelError, Result};
use crate::exec;
use crate::model::{profit_multi_raw, validate_weights, CostModel, Population, ProductionMode};

/// Grid density used by the 1-D production searches.
pub const DEFAULT_GRID: usize = 1024;

/// Quality levels closer than this count as one distinct level.
pub const DISTINCT_QUALITY_TOL: f64 = 1e-4;

/// Two optima whose values differ by less than this are tied; the smaller
/// argument wins.
const VALUE_TIE_TOL: f64 = 1e-10;

/// A converged local maximum of a profit functional.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalMaximum {
    /// Quality vector; joint price searches append the price last.
    pub argument: Vec<f64>,
    /// Profit per buyer at `argument`.
    pub value: f64,
}

/// Outcome of a global maximization.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub global_arg: Vec<f64>,
    pub global_value: f64,
    /// Every distinct local maximum found, best first.
    pub local_maxima: Vec<LocalMaximum>,
    /// Distinct quality levels in `global_arg` at [`DISTINCT_QUALITY_TOL`].
    pub distinct_qualities: usize,
}

/// Optimal profits per displayed-variant count M = 1..=m_max.
#[derive(Debug, Clone, PartialEq)]
pub struct VariantCountTable {
    /// Index `m - 1` holds the M = m result.
    pub results: Vec<OptimizationResult>,
    /// Variant count attaining the maximal profit; ties go to smaller M.
    pub chosen_m: usize,
}

impl VariantCountTable {
    pub fn profit(&self, m: usize) -> f64 {
        self.results[m - 1].global_value
    }

    pub fn chosen(&self) -> &OptimizationResult {
        &self.results[self.chosen_m - 1]
    }

    pub fn m_max(&self) -> usize {
        self.results.len()
    }
}

/// Optimal production choice: nothing, one variant, or two distinct
/// variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductionPhase {
    Nothing,
    OneVariant,
    TwoVariants,
}

impl ProductionPhase {
    pub fn label(self) -> u8 {
        match self {
            ProductionPhase::Nothing => 0,
            ProductionPhase::OneVariant => 1,
            ProductionPhase::TwoVariants => 2,
        }
    }
}

impl std::fmt::Display for ProductionPhase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.label())
    }
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

fn golden_max<F>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..256 {
        if hi - lo <= tol {
            break;
        }
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
}

fn count_distinct(sorted_args: &[f64], tol: f64) -> usize {
    let mut sorted = sorted_args.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut n = 1;
    for w in sorted.windows(2) {
        if w[1] - w[0] > tol {
            n += 1;
        }
    }
    n
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return true;
        }
        if x > y {
            return false;
        }
    }
    false
}

fn linf(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Builds the final result from refined candidates: dedup by argument
/// closeness, order by value, and resolve near-ties toward the smaller
/// argument.
fn assemble(mut candidates: Vec<LocalMaximum>, dedup_tol: f64) -> OptimizationResult {
    candidates.sort_by(|a, b| {
        b.value.total_cmp(&a.value).then_with(|| {
            if lex_less(&a.argument, &b.argument) {
                std::cmp::Ordering::Less
            } else if a.argument == b.argument {
                std::cmp::Ordering::Equal
            } else {
                std::cmp::Ordering::Greater
            }
        })
    });
    let mut kept: Vec<LocalMaximum> = Vec::new();
    for c in candidates {
        if !kept
            .iter()
            .any(|k| linf(&k.argument, &c.argument) <= dedup_tol)
        {
            kept.push(c);
        }
    }
    // near-equal top values: the smaller argument is the canonical global
    let top = kept[0].value;
    let mut best = 0;
    for (i, k) in kept.iter().enumerate() {
        if (top - k.value) <= VALUE_TIE_TOL && lex_less(&k.argument, &kept[best].argument) {
            best = i;
        }
    }
    let global = kept[best].clone();
    let distinct = count_distinct(&global.argument, DISTINCT_QUALITY_TOL);
    OptimizationResult {
        global_arg: global.argument,
        global_value: global.value,
        local_maxima: kept,
        distinct_qualities: distinct,
    }
}

/// Global maximization of a scalar objective on `[lo, hi]`.
///
/// Scans a uniform grid, refines every interior grid-local maximum and any
/// rising boundary by golden section to an interval below `tol`, then
/// deduplicates arguments closer than `10 * tol`. Equal-value ties (within
/// 1e-10) resolve to the smaller argument.
pub fn maximize_1d<F>(
    mut objective: F,
    lo: f64,
    hi: f64,
    grid_points: usize,
    tol: f64,
) -> Result<OptimizationResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(ModelError::InvalidBracket { lo, hi });
    }
    if grid_points < 64 {
        return Err(ModelError::GridTooCoarse {
            min: 64,
            got: grid_points,
        });
    }
    if !tol.is_finite() || tol <= 0.0 {
        return Err(ModelError::InvalidTolerance(tol));
    }

    let n = grid_points;
    let step = (hi - lo) / (n - 1) as f64;
    let xs: Vec<f64> = (0..n)
        .map(|j| if j == n - 1 { hi } else { lo + j as f64 * step })
        .collect();
    let mut vs = Vec::with_capacity(n);
    for &x in &xs {
        vs.push(objective(x)?);
    }

    // Interior candidates take the first point of any plateau; a flat
    // objective therefore yields only the left boundary.
    let mut brackets: Vec<(f64, f64, Option<usize>)> = Vec::new();
    if vs[0] >= vs[1] {
        brackets.push((xs[0], xs[1], Some(0)));
    }
    for j in 1..n - 1 {
        if vs[j] > vs[j - 1] && vs[j] >= vs[j + 1] {
            brackets.push((xs[j - 1], xs[j + 1], None));
        }
    }
    if vs[n - 1] > vs[n - 2] {
        brackets.push((xs[n - 2], xs[n - 1], Some(n - 1)));
    }

    let mut candidates = Vec::with_capacity(brackets.len());
    for (blo, bhi, boundary) in brackets {
        let (mut x, mut v) = golden_max(&mut objective, blo, bhi, tol)?;
        if let Some(idx) = boundary {
            // the exact endpoint may beat anything golden converged to
            if vs[idx] >= v {
                x = xs[idx];
                v = vs[idx];
            }
        }
        candidates.push(LocalMaximum {
            argument: vec![x],
            value: v,
        });
    }
    Ok(assemble(candidates, 10.0 * tol))
}

/// Shared setup for the multi-variant searches.
struct QualityProblem<'a> {
    pop: &'a Population,
    cost: &'a CostModel,
    weights: Vec<f64>,
    price: f64,
    beta: f64,
    gamma: f64,
}

impl QualityProblem<'_> {
    fn eval(&self, qualities: &[f64]) -> f64 {
        profit_multi_raw(
            qualities,
            &self.weights,
            self.price,
            self.beta,
            self.gamma,
            self.pop,
            self.cost,
        )
    }
}

const COORD_SCAN_POINTS: usize = 17;
const COORD_TOL: f64 = 1e-7;
const SWEEP_TOL: f64 = 1e-10;
const MAX_SWEEPS: usize = 1000;

/// One coordinate update: coarse scan to bracket the best slice value, then
/// golden refinement inside the bracket. Never regresses below the current
/// point.
fn refine_coordinate<F>(f: F, lo: f64, hi: f64, cur_x: f64, cur_v: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let step = (hi - lo) / (COORD_SCAN_POINTS - 1) as f64;
    let mut grid_x = lo;
    let mut grid_v = f(lo);
    for j in 1..COORD_SCAN_POINTS {
        let x = if j == COORD_SCAN_POINTS - 1 {
            hi
        } else {
            lo + j as f64 * step
        };
        let v = f(x);
        if v > grid_v {
            grid_x = x;
            grid_v = v;
        }
    }
    let blo = (grid_x - step).max(lo);
    let bhi = (grid_x + step).min(hi);
    let (gx, gv) =
        golden_max(|x| Ok::<f64, ModelError>(f(x)), blo, bhi, COORD_TOL).expect("infallible");

    let (mut bx, mut bv) = (cur_x, cur_v);
    if grid_v > bv {
        bx = grid_x;
        bv = grid_v;
    }
    if gv > bv {
        bx = gx;
        bv = gv;
    }
    (bx, bv)
}

fn coordinate_ascent(problem: &QualityProblem, start: &[f64]) -> (Vec<f64>, f64) {
    let mut q = start.to_vec();
    let mut value = problem.eval(&q);
    for _ in 0..MAX_SWEEPS {
        let before = value;
        let previous = q.clone();
        for d in 0..q.len() {
            let cur = q[d];
            let (x, v) = refine_coordinate(
                |x| {
                    let mut trial = q.clone();
                    trial[d] = x;
                    problem.eval(&trial)
                },
                0.0,
                problem.price,
                cur,
                value,
            );
            q[d] = x;
            value = v;
        }
        // line search along the sweep displacement; pure coordinate
        // cycling zigzags slowly along the diagonal valleys the selection
        // denominator couples into the landscape
        let moved = q.iter().zip(&previous).any(|(a, b)| a != b);
        if moved {
            let at = |t: f64| -> Vec<f64> {
                q.iter()
                    .zip(&previous)
                    .map(|(&a, &b)| (a + t * (a - b)).clamp(0.0, problem.price))
                    .collect()
            };
            let (t, v) = golden_max(
                |t| Ok::<f64, ModelError>(problem.eval(&at(t))),
                0.0,
                8.0,
                1e-4,
            )
            .expect("infallible");
            if v > value {
                q = at(t);
                value = v;
            }
        }
        if value - before < SWEEP_TOL {
            break;
        }
    }
    (q, value)
}

fn lattice_levels(price: f64) -> [f64; 4] {
    [0.125 * price, 0.375 * price, 0.625 * price, 0.875 * price]
}

fn sorted_tuples(levels: &[f64], m: usize) -> Vec<Vec<f64>> {
    fn rec(levels: &[f64], m: usize, from: usize, cur: &mut Vec<f64>, out: &mut Vec<Vec<f64>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for i in from..levels.len() {
            cur.push(levels[i]);
            rec(levels, m, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(levels, m, 0, &mut Vec::new(), &mut out);
    out
}

fn cartesian_tuples(levels: &[f64], m: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = vec![vec![]];
    for _ in 0..m {
        let mut next = Vec::with_capacity(out.len() * levels.len());
        for t in &out {
            for &l in levels {
                let mut t = t.clone();
                t.push(l);
                next.push(t);
            }
        }
        out = next;
    }
    out
}

fn is_uniform(weights: &[f64]) -> bool {
    weights
        .windows(2)
        .all(|w| (w[0] - w[1]).abs() <= f64::EPSILON)
}

fn validate_common(
    m: usize,
    pop: &Population,
    cost: &CostModel,
    weights: Option<&[f64]>,
    price: f64,
    beta: f64,
) -> Result<Vec<f64>> {
    if m == 0 {
        return Err(ModelError::ZeroCount);
    }
    if !price.is_finite() || price <= 0.0 {
        return Err(ModelError::InvalidPrice(price));
    }
    if price != 1.0 {
        if beta != 1.0 {
            return Err(ModelError::UnsupportedConfiguration(
                "a price different from 1 requires beta = 1".into(),
            ));
        }
        let bound = pop.min_alpha() + 1.0;
        if price > bound {
            return Err(ModelError::PriceAboveBound { price, bound });
        }
    }
    if cost.mode() == ProductionMode::DamagedGoods && m < 2 {
        return Err(ModelError::DamagedGoodsSingleVariant);
    }
    match weights {
        Some(w) => {
            if w.len() != m {
                return Err(ModelError::WeightCountMismatch {
                    expected: m,
                    got: w.len(),
                });
            }
            validate_weights(w)?;
            Ok(w.to_vec())
        }
        None => Ok(vec![1.0 / m as f64; m]),
    }
}

/// Global maximization of the M-variant expected profit over qualities in
/// `[0, price]^M` (uniform weights when `weights` is `None`).
///
/// M <= 4 runs multi-start coordinate ascent from a 4-per-axis lattice
/// (sorted tuples under uniform weights, the full lattice otherwise).
/// Larger M optimizes the two-level form — a duplicated low level plus one
/// premium level — over every split, which the unconstrained search
/// reproduces wherever both are feasible. Uniform-weight results are
/// reported as sorted vectors; weighted problems keep their labels.
pub fn maximize_qualities(
    m: usize,
    pop: &Population,
    cost: &CostModel,
    weights: Option<&[f64]>,
    price: f64,
) -> Result<OptimizationResult> {
    maximize_qualities_with(m, pop, cost, weights, price, 1.0, 1.0)
}

/// [`maximize_qualities`] with explicit exponents β and γ.
pub fn maximize_qualities_with(
    m: usize,
    pop: &Population,
    cost: &CostModel,
    weights: Option<&[f64]>,
    price: f64,
    beta: f64,
    gamma: f64,
) -> Result<OptimizationResult> {
    let weights = validate_common(m, pop, cost, weights, price, beta)?;
    let problem = QualityProblem {
        pop,
        cost,
        weights,
        price,
        beta,
        gamma,
    };

    if m == 1 {
        return maximize_1d(|q| Ok(problem.eval(&[q])), 0.0, price, DEFAULT_GRID, 1e-9);
    }

    if m <= 4 {
        let uniform = is_uniform(&problem.weights);
        let levels = lattice_levels(price);
        let starts = if uniform {
            sorted_tuples(&levels, m)
        } else {
            cartesian_tuples(&levels, m)
        };
        let mut candidates = Vec::with_capacity(starts.len());
        for start in &starts {
            let (mut arg, value) = coordinate_ascent(&problem, start);
            if uniform {
                arg.sort_by(f64::total_cmp);
            }
            candidates.push(LocalMaximum {
                argument: arg,
                value,
            });
        }
        return Ok(assemble(candidates, DISTINCT_QUALITY_TOL));
    }

    if !is_uniform(&problem.weights) {
        return Err(ModelError::UnsupportedConfiguration(
            "more than 4 variants require uniform weights".into(),
        ));
    }
    two_level_search(m, &problem)
}

/// Expected profit of a display holding `n_lo` copies of quality `q_lo`
/// and `n_hi` copies of `q_hi` (uniform weights cancel out of the
/// selection probabilities, so this is O(groups) per call).
fn two_level_value(
    problem: &QualityProblem,
    q_lo: f64,
    q_hi: f64,
    n_lo: usize,
    n_hi: usize,
) -> f64 {
    let m = n_lo + n_hi;
    let price = problem.price;
    let gamma = problem.gamma;
    let damaged = problem.cost.mode() == ProductionMode::DamagedGoods;
    let priced = price != 1.0;
    let q_top = if n_hi > 0 { q_hi.max(q_lo) } else { q_lo };
    let q_sel_max = match (n_lo > 0, n_hi > 0) {
        (true, true) => q_lo.max(q_hi),
        (true, false) => q_lo,
        (false, true) => q_hi,
        (false, false) => return -problem.cost.fixed_cost(m),
    };

    let margin_of = |q: f64| {
        let base = if damaged { q_top } else { q };
        if gamma == 1.0 {
            price - base
        } else {
            price - base.powf(gamma)
        }
    };

    let mut total = 0.0;
    for g in problem.pop.groups() {
        let alpha = g.alpha();
        let sigma = g.sigma();
        let pref = if priced {
            1.0 - price / (alpha + 1.0)
        } else if problem.beta == 1.0 {
            1.0 - 1.0 / (alpha + 1.0)
        } else {
            1.0 - (alpha + 1.0).powf(-problem.beta)
        };
        let pa = |q: f64| {
            pref * if priced {
                (q / price).powf(alpha)
            } else {
                q.powf(alpha)
            }
        };
        let group_value = if q_sel_max == 0.0 {
            // all displayed qualities zero: nothing is ever accepted
            0.0
        } else if sigma == 0.0 {
            (n_lo as f64 * (margin_of(q_lo) * pa(q_lo))
                + n_hi as f64 * (margin_of(q_hi) * pa(q_hi)))
                / m as f64
        } else {
            let u_lo = if n_lo > 0 {
                (q_lo / q_sel_max).powf(sigma)
            } else {
                0.0
            };
            let u_hi = if n_hi > 0 {
                (q_hi / q_sel_max).powf(sigma)
            } else {
                0.0
            };
            let denom = n_lo as f64 * u_lo + n_hi as f64 * u_hi;
            if denom == 0.0 {
                0.0
            } else {
                (n_lo as f64 * u_lo * (margin_of(q_lo) * pa(q_lo))
                    + n_hi as f64 * u_hi * (margin_of(q_hi) * pa(q_hi)))
                    / denom
            }
        };
        total += g.proportion() * group_value;
    }
    total - problem.cost.fixed_cost(m)
}

fn expand_two_level(q_lo: f64, q_hi: f64, n_lo: usize, n_hi: usize) -> Vec<f64> {
    let mut arg = Vec::with_capacity(n_lo + n_hi);
    let (a, b, na, nb) = if q_lo <= q_hi {
        (q_lo, q_hi, n_lo, n_hi)
    } else {
        (q_hi, q_lo, n_hi, n_lo)
    };
    arg.extend(std::iter::repeat_n(a, na));
    arg.extend(std::iter::repeat_n(b, nb));
    arg
}

fn two_level_search(m: usize, problem: &QualityProblem) -> Result<OptimizationResult> {
    let levels = lattice_levels(problem.price);
    let mut candidates = Vec::new();

    // single shared level
    let flat = maximize_1d(
        |q| Ok(two_level_value(problem, q, 0.0, m, 0)),
        0.0,
        problem.price,
        256,
        1e-9,
    )?;
    candidates.push(LocalMaximum {
        argument: vec![flat.global_arg[0]; m],
        value: flat.global_value,
    });

    // every split into a duplicated level and a premium level
    for n_hi in 1..m {
        let n_lo = m - n_hi;
        let mut best: Option<(Vec<f64>, f64)> = None;
        for pair in sorted_tuples(&levels, 2) {
            let (mut ql, mut qh) = (pair[0], pair[1]);
            let mut value = two_level_value(problem, ql, qh, n_lo, n_hi);
            for _ in 0..MAX_SWEEPS {
                let before = value;
                let (x, v) = refine_coordinate(
                    |x| two_level_value(problem, x, qh, n_lo, n_hi),
                    0.0,
                    problem.price,
                    ql,
                    value,
                );
                ql = x;
                value = v;
                let (x, v) = refine_coordinate(
                    |x| two_level_value(problem, ql, x, n_lo, n_hi),
                    0.0,
                    problem.price,
                    qh,
                    value,
                );
                qh = x;
                value = v;
                if value - before < SWEEP_TOL {
                    break;
                }
            }
            let arg = expand_two_level(ql, qh, n_lo, n_hi);
            match &best {
                Some((_, bv)) if *bv >= value => {}
                _ => best = Some((arg, value)),
            }
        }
        let (arg, value) = best.expect("at least one start");
        candidates.push(LocalMaximum {
            argument: arg,
            value,
        });
    }
    Ok(assemble(candidates, DISTINCT_QUALITY_TOL))
}

/// Joint maximization of the priced single-product profit over
/// `0 <= q <= p <= min(alpha) + 1` (homogeneous populations only), by a
/// price search whose objective is an inner quality search.
pub fn maximize_price_quality(pop: &Population, cost: &CostModel) -> Result<OptimizationResult> {
    if pop.groups().len() != 1 {
        return Err(ModelError::HeterogeneousPopulation(pop.groups().len()));
    }
    if cost.mode() == ProductionMode::DamagedGoods {
        return Err(ModelError::DamagedGoodsSingleVariant);
    }
    let alpha = pop.groups()[0].alpha();
    let p_hi = alpha + 1.0;

    let inner = |p: f64| -> Result<OptimizationResult> {
        maximize_1d(
            |q| Ok(profit_multi_raw(&[q], &[1.0], p, 1.0, 1.0, pop, cost)),
            0.0,
            p,
            128,
            (p * 1e-9).max(1e-15),
        )
    };

    let outer = maximize_1d(
        |p| inner(p).map(|r| r.global_value),
        1e-6,
        p_hi,
        DEFAULT_GRID,
        1e-9,
    )?;

    let mut maxima = Vec::with_capacity(outer.local_maxima.len());
    for lm in &outer.local_maxima {
        let p = lm.argument[0];
        let best_q = inner(p)?;
        maxima.push(LocalMaximum {
            argument: vec![best_q.global_arg[0], p],
            value: best_q.global_value,
        });
    }
    let mut result = assemble(maxima, DISTINCT_QUALITY_TOL);
    result.distinct_qualities = 1;
    Ok(result)
}

/// Optimal profit for every variant count up to `m_max`; ties between
/// counts resolve to the smaller one.
pub fn best_variant_count(
    m_max: usize,
    pop: &Population,
    cost: &CostModel,
) -> Result<VariantCountTable> {
    if m_max == 0 {
        return Err(ModelError::ZeroCount);
    }
    let runs = exec::map_indexed(m_max, |i| maximize_qualities(i + 1, pop, cost, None, 1.0));
    let mut results = Vec::with_capacity(m_max);
    for r in runs {
        results.push(r?);
    }
    let mut chosen_m = 1;
    for (i, r) in results.iter().enumerate() {
        if r.global_value > results[chosen_m - 1].global_value {
            chosen_m = i + 1;
        }
    }
    Ok(VariantCountTable { results, chosen_m })
}

/// Gap above which two optimal qualities count as genuinely differentiated
/// for the phase label.
pub const PHASE_DISTINCT_GAP: f64 = 1e-3;

/// Production phase at most two variants: 0 when even the best display
/// loses money, 2 when two genuinely distinct qualities beat one variant,
/// 1 otherwise. Duplicated optimal qualities count as phase 1 since
/// displaying one copy is cheaper by z.
pub fn differentiation_decision(
    pop: &Population,
    cost: &CostModel,
    weights: Option<&[f64]>,
) -> Result<ProductionPhase> {
    let one = maximize_qualities(1, pop, cost, None, 1.0)?;
    let two = maximize_qualities(2, pop, cost, weights, 1.0)?;
    Ok(decide_phase(&one, &two))
}

pub(crate) fn decide_phase(one: &OptimizationResult, two: &OptimizationResult) -> ProductionPhase {
    if one.global_value.max(two.global_value) <= 0.0 {
        return ProductionPhase::Nothing;
    }
    if one.global_value >= two.global_value {
        return ProductionPhase::OneVariant;
    }
    let gap = (two.global_arg[1] - two.global_arg[0]).abs();
    if gap > PHASE_DISTINCT_GAP {
        ProductionPhase::TwoVariants
    } else {
        ProductionPhase::OneVariant
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form;
    use crate::model::{expected_profit_single, BuyerGroup};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn two_group(a1: f64, s1: f64, a2: f64, s2: f64, c2: f64) -> Population {
        Population::new(
            vec![
                BuyerGroup::new(a1, s1, 1.0 - c2).unwrap(),
                BuyerGroup::new(a2, s2, c2).unwrap(),
            ],
            1,
        )
        .unwrap()
    }

    #[test]
    fn constant_objective_returns_left_boundary() {
        let r = maximize_1d(|_| Ok(1.0), 0.0, 1.0, 64, 1e-8).unwrap();
        assert_eq!(r.global_arg[0], 0.0);
        assert_eq!(r.local_maxima.len(), 1);
    }

    #[test]
    fn monotone_objectives_hit_the_right_boundary() {
        let r = maximize_1d(Ok, 0.0, 2.0, 64, 1e-9).unwrap();
        assert_eq!(r.global_arg[0], 2.0);
        let r = maximize_1d(|x| Ok(-x), 0.0, 2.0, 64, 1e-9).unwrap();
        assert_eq!(r.global_arg[0], 0.0);
    }

    #[test]
    fn homogeneous_profit_peak_matches_closed_form() {
        let cost = CostModel::independent(0.0).unwrap();
        let pop = Population::homogeneous(1.0, 0.0).unwrap();
        let r = maximize_1d(
            |q| expected_profit_single(q, &pop, &cost),
            0.0,
            1.0,
            DEFAULT_GRID,
            1e-9,
        )
        .unwrap();
        assert!((r.global_arg[0] - 0.5).abs() < 1e-6);
        assert!((r.global_value - 0.125).abs() < 1e-10);
    }

    #[test]
    fn two_group_landscape_has_two_maxima() {
        let cost = CostModel::independent(0.01).unwrap();
        let pop = two_group(0.1, 0.0, 3.0, 0.0, 0.3);
        let r = maximize_1d(
            |q| expected_profit_single(q, &pop, &cost),
            0.0,
            1.0,
            DEFAULT_GRID,
            1e-9,
        )
        .unwrap();
        assert_eq!(r.local_maxima.len(), 2, "{:?}", r.local_maxima);
        // below the transition the low-quality peak is global
        assert!(r.global_arg[0] < 0.2, "global at {}", r.global_arg[0]);
    }

    #[test]
    fn input_validation() {
        assert!(maximize_1d(|_| Ok(0.0), 1.0, 0.0, 64, 1e-6).is_err());
        assert!(maximize_1d(|_| Ok(0.0), 0.0, 1.0, 32, 1e-6).is_err());
        assert!(maximize_1d(|_| Ok(0.0), 0.0, 1.0, 64, 0.0).is_err());
        let pop = Population::homogeneous(1.0, 0.0).unwrap();
        let cost = CostModel::independent(0.0).unwrap();
        assert!(maximize_qualities(0, &pop, &cost, None, 1.0).is_err());
        assert!(maximize_qualities(2, &pop, &cost, Some(&[0.4, 0.7]), 1.0).is_err());
        assert!(maximize_qualities(2, &pop, &cost, Some(&[1.0]), 1.0).is_err());
        assert!(maximize_qualities(2, &pop, &cost, None, 3.5).is_err());
    }

    #[test]
    fn objective_errors_propagate() {
        let r = maximize_1d(
            |x| {
                if x > 0.9 {
                    Err(ModelError::InvalidCost(x))
                } else {
                    Ok(x)
                }
            },
            0.0,
            1.0,
            64,
            1e-6,
        );
        assert!(r.is_err());
    }

    #[test]
    fn single_variant_matches_closed_form() {
        let cost = CostModel::independent(0.0).unwrap();
        for &alpha in &[0.3, 1.0, 2.0] {
            let pop = Population::homogeneous(alpha, 0.0).unwrap();
            let r = maximize_qualities(1, &pop, &cost, None, 1.0).unwrap();
            let q = closed_form::optimal_quality_homogeneous(alpha).unwrap();
            assert!((r.global_arg[0] - q).abs() < 1e-6, "alpha={alpha}");
        }
    }

    #[test]
    fn differentiated_optimum_for_mixed_population() {
        // two groups with clearly separated tastes and small fixed cost
        let pop = two_group(0.2, 0.5, 3.0, 3.0, 0.5);
        let cost = CostModel::independent(0.002).unwrap();
        let one = maximize_qualities(1, &pop, &cost, None, 1.0).unwrap();
        let two = maximize_qualities(2, &pop, &cost, None, 1.0).unwrap();
        assert!(two.global_value > one.global_value);
        assert_eq!(two.distinct_qualities, 2);
        assert!(two.global_arg[0] < 0.3);
        assert!(two.global_arg[1] > 0.6);
        // sorted canonical form
        assert!(two.global_arg[0] <= two.global_arg[1]);
        assert_eq!(
            differentiation_decision(&pop, &cost, None).unwrap(),
            ProductionPhase::TwoVariants
        );
    }

    #[test]
    fn random_starts_land_on_the_lattice_answer() {
        let pop = two_group(0.2, 0.5, 3.0, 3.0, 0.5);
        let cost = CostModel::independent(0.002).unwrap();
        let reference = maximize_qualities(2, &pop, &cost, None, 1.0).unwrap();
        let problem = QualityProblem {
            pop: &pop,
            cost: &cost,
            weights: vec![0.5, 0.5],
            price: 1.0,
            beta: 1.0,
            gamma: 1.0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let start = [rng.gen::<f64>(), rng.gen::<f64>()];
            let (mut arg, value) = coordinate_ascent(&problem, &start);
            arg.sort_by(f64::total_cmp);
            // every random start converges to one of the deterministic
            // local maxima; the best ones match the global
            let near = reference
                .local_maxima
                .iter()
                .any(|lm| linf(&lm.argument, &arg) < 1e-4);
            assert!(near, "stray optimum {arg:?} value {value}");
        }
    }

    #[test]
    fn homogeneous_population_never_differentiates() {
        let cost = CostModel::independent(0.002).unwrap();
        for &(alpha, sigma) in &[(0.2, 0.5), (1.0, 2.0), (3.0, 3.0)] {
            let pop = Population::homogeneous(alpha, sigma).unwrap();
            let phase = differentiation_decision(&pop, &cost, None).unwrap();
            assert_ne!(phase, ProductionPhase::TwoVariants, "alpha={alpha}");
            // also under biased display weights (unanswered in general;
            // checked empirically here)
            let phase = differentiation_decision(&pop, &cost, Some(&[0.3, 0.7])).unwrap();
            assert_ne!(
                phase,
                ProductionPhase::TwoVariants,
                "alpha={alpha} weighted"
            );
        }
    }

    #[test]
    fn ruinous_fixed_cost_gives_phase_zero() {
        let pop = two_group(0.2, 0.5, 0.4, 1.0, 0.5);
        let cost = CostModel::independent(0.2).unwrap();
        assert_eq!(
            differentiation_decision(&pop, &cost, None).unwrap(),
            ProductionPhase::Nothing
        );
    }

    #[test]
    fn variant_table_reports_losses_as_is() {
        let pop = two_group(0.2, 0.5, 3.0, 3.0, 0.5);
        let cost = CostModel::independent(0.5).unwrap();
        let table = best_variant_count(4, &pop, &cost).unwrap();
        assert_eq!(table.chosen_m, 1);
        assert!(table.profit(1) <= 0.0);
    }

    #[test]
    fn two_level_form_matches_unconstrained_at_m4() {
        let cost = CostModel::independent(0.002).unwrap();
        for &c2 in &[0.3, 0.5, 0.7] {
            let pop = two_group(0.2, 0.5, 3.0, 3.0, c2);
            let full = maximize_qualities(4, &pop, &cost, None, 1.0).unwrap();
            let problem = QualityProblem {
                pop: &pop,
                cost: &cost,
                weights: vec![0.25; 4],
                price: 1.0,
                beta: 1.0,
                gamma: 1.0,
            };
            let ansatz = two_level_search(4, &problem).unwrap();
            assert!(
                full.global_value <= ansatz.global_value + 1e-6,
                "c2={c2}: unconstrained {} beats two-level {}",
                full.global_value,
                ansatz.global_value
            );
        }
    }

    #[test]
    fn price_quality_search_matches_closed_form() {
        let cost = CostModel::independent(0.0).unwrap();
        for &alpha in &[0.0, 1.0, 2.0] {
            let pop = Population::homogeneous(alpha, 0.0).unwrap();
            let r = maximize_price_quality(&pop, &cost).unwrap();
            let o = closed_form::optimal_price_quality(alpha).unwrap();
            assert!((r.global_arg[0] - o.q_star).abs() < 1e-5, "alpha={alpha} q");
            assert!((r.global_arg[1] - o.p_star).abs() < 1e-5, "alpha={alpha} p");
        }
        let hetero = two_group(0.5, 0.0, 2.0, 0.0, 0.5);
        assert!(matches!(
            maximize_price_quality(&hetero, &cost),
            Err(ModelError::HeterogeneousPopulation(2))
        ));
    }

    #[test]
    fn variant_profit_shifts_additively_in_z() {
        let pop = two_group(0.2, 0.5, 3.0, 3.0, 0.5);
        let zs = [0.0, 0.002, 0.01, 0.05];
        let tables: Vec<_> = zs
            .iter()
            .map(|&z| best_variant_count(4, &pop, &CostModel::independent(z).unwrap()).unwrap())
            .collect();
        for m in 1..=4 {
            for w in tables.windows(2) {
                assert!(w[0].profit(m) >= w[1].profit(m) - 1e-12);
            }
            // independent fixed costs shift each profit by exactly M*z
            for (t, &z) in tables.iter().zip(&zs) {
                assert!(
                    (t.profit(m) - (tables[0].profit(m) - m as f64 * z)).abs() < 1e-7,
                    "m={m} z={z}"
                );
            }
        }
    }
}
