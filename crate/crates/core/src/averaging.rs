//! Empirical averages over Følner boxes, randomized subsampled averages,
//! generalized U-statistics and subgroup/rotation-subsampled averages.

use std::sync::Arc;

use crate::groups::{d4_apply, d4_inverse};
use crate::processes::{box_offsets, MaField, Window};
use crate::rng::{derive_seed, stream, KeyedRng};
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Statistics on lattice fields
// ---------------------------------------------------------------------------

/// Moment information attached to a statistic, used by hypothesis checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MomentTag {
    /// Bounded or square-integrable: supports the finite-range hypothesis.
    SecondMoment,
    /// 2+ε moments available.
    HigherMoment { eps: f64 },
    /// Nothing usable.
    Heavy,
}

/// A real statistic reading field values on a finite dependency region around
/// the origin (`‖t‖∞ ≤ radius`).
#[derive(Clone)]
pub struct Statistic<const D: usize> {
    pub radius: i64,
    /// Analytic mean under the model, when known; used for centering.
    pub mean: Option<f64>,
    /// Per-argument Lipschitz / self-bounding coefficients.
    pub lipschitz: Vec<f64>,
    pub moment: MomentTag,
    eval: Arc<dyn Fn(&FieldView<'_, D>) -> f64 + Send + Sync>,
}

impl<const D: usize> Statistic<D> {
    pub fn new(
        radius: i64,
        eval: impl Fn(&FieldView<'_, D>) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Statistic {
            radius,
            mean: None,
            lipschitz: vec![1.0],
            moment: MomentTag::SecondMoment,
            eval: Arc::new(eval),
        }
    }

    pub fn with_mean(mut self, mean: f64) -> Self {
        self.mean = Some(mean);
        self
    }

    pub fn with_moment(mut self, tag: MomentTag) -> Self {
        self.moment = tag;
        self
    }

    /// The site statistic `f = X_0`.
    pub fn site() -> Self {
        Statistic::new(0, |v| v.get([0i64; D]))
    }

    #[inline]
    pub fn eval(&self, view: &FieldView<'_, D>) -> f64 {
        (self.eval)(view)
    }
}

impl Statistic<1> {
    /// `f = X_0 X_L` on the line.
    pub fn pair_lag(lag: i64) -> Self {
        Statistic::new(lag.abs(), move |v| v.get([0]) * v.get([lag]))
    }

    /// `f = X_0² − shift`.
    pub fn square(shift: f64) -> Self {
        Statistic::new(0, move |v| {
            let x = v.get([0]);
            x * x - shift
        })
    }
}

impl Statistic<2> {
    /// `f = X_(0,0) X_(L,0)` in the plane (anisotropic for L ≠ 0).
    pub fn pair_lag_x(lag: i64) -> Self {
        Statistic::new(lag.abs(), move |v| v.get([0, 0]) * v.get([lag, 0]))
    }
}

/// Read-only view of a transformed field: `view.get(t) = window[m(t) + off]`
/// where `m` is a point-group element (identity when `rot == 0`).
pub struct FieldView<'a, const D: usize> {
    win: &'a Window<D>,
    off: [i64; D],
    rot: u8,
}

impl<'a, const D: usize> FieldView<'a, D> {
    pub fn translated(win: &'a Window<D>, off: [i64; D]) -> Self {
        FieldView { win, off, rot: 0 }
    }

    #[inline]
    pub fn get(&self, t: [i64; D]) -> f64 {
        let mut s = self.map(t);
        for i in 0..D {
            s[i] += self.off[i];
        }
        self.win.get(s)
    }

    #[inline]
    fn map(&self, t: [i64; D]) -> [i64; D] {
        if self.rot == 0 {
            return t;
        }
        debug_assert_eq!(D, 2);
        let mut s = t;
        let v = d4_apply(self.rot, [t[0], t[1]]);
        s[0] = v[0];
        s[1] = v[1];
        s
    }
}

/// View of `gX` for `g = (shift, rot)` in `Z² ⋊ D₄` acting on the plane:
/// `(gX)_t = X_{g⁻¹t}` with `g⁻¹t = θ⁻¹(t − z)`.
pub fn dihedral_view<'a>(win: &'a Window<2>, shift: [i64; 2], rot: u8) -> FieldView<'a, 2> {
    let inv = d4_inverse(rot);
    let zi = d4_apply(inv, shift);
    FieldView { win, off: [-zi[0], -zi[1]], rot: inv }
}

// ---------------------------------------------------------------------------
// Results and schemes
// ---------------------------------------------------------------------------

/// Tag of the sampling scheme used to produce an average.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeTag {
    Deterministic,
    Haar,
    Poisson,
    WithReplacement,
    WithoutReplacement,
}

/// Randomized sampling rule for the subsampled empirical measure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SamplingScheme {
    /// Counting measure: identical to the deterministic average.
    Haar,
    /// Independent Poisson multiplicity per transformation.
    Poisson { intensity: f64 },
    /// `m` uniform draws with replacement.
    WithReplacement { m: usize },
    /// `m` uniform draws without replacement.
    WithoutReplacement { m: usize },
}

impl SamplingScheme {
    pub fn tag(&self) -> SchemeTag {
        match self {
            SamplingScheme::Haar => SchemeTag::Haar,
            SamplingScheme::Poisson { .. } => SchemeTag::Poisson,
            SamplingScheme::WithReplacement { .. } => SchemeTag::WithReplacement,
            SamplingScheme::WithoutReplacement { .. } => SchemeTag::WithoutReplacement,
        }
    }
}

/// Outcome of an averaging operation.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct AverageResult {
    pub value: f64,
    pub n: u64,
    /// Number of (weighted) evaluation points.
    pub count: u64,
    pub scheme: SchemeTag,
    pub seed: u64,
    /// Times an empty random sample had to be redrawn.
    pub resamples: u32,
}

// ---------------------------------------------------------------------------
// Deterministic empirical average on Z^D
// ---------------------------------------------------------------------------

fn box_sites<const D: usize>(n: i64) -> impl Iterator<Item = [i64; D]> {
    box_offsets::<D>(n)
}

/// `F_n(f, X)` over the box Følner set of radius `n`, evaluated on an already
/// sampled window (which must cover radius `n + f.radius`).
pub fn average_over_window<const D: usize>(
    win: &Window<D>,
    stat: &Statistic<D>,
    n: i64,
) -> AverageResult {
    let mut acc = 0.0;
    let mut count = 0u64;
    for z in box_sites::<D>(n) {
        let mut off = z;
        for c in off.iter_mut() {
            *c = -*c;
        }
        let view = FieldView::translated(win, off);
        acc += stat.eval(&view);
        count += 1;
    }
    AverageResult {
        value: acc / count as f64,
        n: n as u64,
        count,
        scheme: SchemeTag::Deterministic,
        seed: win.seed,
        resamples: 0,
    }
}

/// Samples the required window and averages `f(φX)` over the box of radius
/// `n`; exact sum over all `|A_n|` translations.
pub fn empirical_average<const D: usize>(
    field: &MaField<D>,
    stat: &Statistic<D>,
    n: i64,
    seed: u64,
) -> AverageResult {
    let r = n + stat.radius + 0i64.max(0);
    let win = field.sample_window(seed, [-r; D], [r; D]);
    average_over_window(&win, stat, n)
}

// ---------------------------------------------------------------------------
// Randomized subsampled averages (arity 1)
// ---------------------------------------------------------------------------

/// Randomized empirical measure over the box of radius `n`: the μ-weighted
/// average of `f(φX)` over sampled transformations inside the Følner set.
/// The scheme realization is seeded independently of the process. An empty
/// realization is redrawn (resample count reported); the configured limit
/// guards against degenerate schemes.
pub fn randomized_average<const D: usize>(
    win: &Window<D>,
    stat: &Statistic<D>,
    n: i64,
    scheme: SamplingScheme,
    scheme_seed: u64,
) -> Result<AverageResult> {
    const RESAMPLE_LIMIT: u32 = 64;
    let sites: Vec<[i64; D]> = box_sites::<D>(n).collect();
    let total = sites.len();

    let mut resamples = 0u32;
    loop {
        let attempt_seed = derive_seed(scheme_seed, stream::SCHEME, resamples as u64);
        // Weights per site in canonical box order; accumulation order is
        // canonical so the exhaustive cases match the deterministic path
        // bit-exactly.
        let weights: Vec<u64> = match scheme {
            SamplingScheme::Haar => vec![1; total],
            SamplingScheme::Poisson { intensity } => {
                if !(intensity > 0.0) {
                    return Err(Error::InvalidParameter("Poisson intensity must be positive".into()));
                }
                sites
                    .iter()
                    .enumerate()
                    .map(|(i, _)| {
                        KeyedRng::from_key(attempt_seed, &[stream::SCHEME, i as u64])
                            .poisson(intensity)
                    })
                    .collect()
            }
            SamplingScheme::WithReplacement { m } => {
                let mut w = vec![0u64; total];
                let mut rng = KeyedRng::from_key(attempt_seed, &[stream::SCHEME]);
                for _ in 0..m {
                    w[rng.below(total)] += 1;
                }
                w
            }
            SamplingScheme::WithoutReplacement { m } => {
                if m > total {
                    return Err(Error::InvalidParameter(format!(
                        "cannot draw {m} of {total} without replacement"
                    )));
                }
                let mut idx: Vec<usize> = (0..total).collect();
                let mut rng = KeyedRng::from_key(attempt_seed, &[stream::SCHEME]);
                // partial Fisher-Yates: first m entries are the sample
                for i in 0..m {
                    let j = i + rng.below(total - i);
                    idx.swap(i, j);
                }
                let mut w = vec![0u64; total];
                for &i in &idx[..m] {
                    w[i] = 1;
                }
                w
            }
        };
        let mass: u64 = weights.iter().sum();
        if mass == 0 {
            resamples += 1;
            if resamples > RESAMPLE_LIMIT {
                return Err(Error::EmptySample { attempts: resamples });
            }
            continue;
        }
        let mut acc = 0.0;
        for (site, &w) in sites.iter().zip(&weights) {
            if w > 0 {
                let mut off = *site;
                for c in off.iter_mut() {
                    *c = -*c;
                }
                let view = FieldView::translated(win, off);
                acc += w as f64 * stat.eval(&view);
            }
        }
        return Ok(AverageResult {
            value: acc / mass as f64,
            n: n as u64,
            count: mass,
            scheme: scheme.tag(),
            seed: scheme_seed,
            resamples,
        });
    }
}

// ---------------------------------------------------------------------------
// Generalized U-statistics over the finitary symmetric group
// ---------------------------------------------------------------------------

/// Exact generalized U-statistic: the average of `g` over all injective
/// `k`-tuples from `{0..n}`. `g` receives tuple indices so callers can close
/// over sequences, graphs or anything indexable.
pub fn u_statistic_exact(n: usize, k: usize, g: impl Fn(&[usize]) -> f64) -> Result<f64> {
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!("arity {k} exceeds n = {n}")));
    }
    let mut tuple = vec![0usize; k];
    let mut used = vec![false; n];
    let mut acc = 0.0;
    let mut count = 0u64;
    fn rec(
        depth: usize,
        n: usize,
        tuple: &mut Vec<usize>,
        used: &mut Vec<bool>,
        g: &impl Fn(&[usize]) -> f64,
        acc: &mut f64,
        count: &mut u64,
    ) {
        if depth == tuple.len() {
            *acc += g(tuple);
            *count += 1;
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                tuple[depth] = i;
                rec(depth + 1, n, tuple, used, g, acc, count);
                used[i] = false;
            }
        }
    }
    rec(0, n, &mut tuple, &mut used, &g, &mut acc, &mut count);
    Ok(acc / count as f64)
}

/// Monte Carlo U-statistic: averages `g` over `m` uniformly drawn injective
/// tuples. Agrees with the exact mode in expectation.
pub fn u_statistic_sampled(
    n: usize,
    k: usize,
    m: usize,
    seed: u64,
    g: impl Fn(&[usize]) -> f64,
) -> Result<f64> {
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!("arity {k} exceeds n = {n}")));
    }
    let mut rng = KeyedRng::from_key(seed, &[stream::TUPLES]);
    let mut acc = 0.0;
    let mut tuple = vec![0usize; k];
    for _ in 0..m {
        // rejection keeps the tuple law exactly uniform over injective tuples
        'draw: loop {
            for slot in tuple.iter_mut() {
                *slot = rng.below(n);
            }
            for a in 0..k {
                for b in a + 1..k {
                    if tuple[a] == tuple[b] {
                        continue 'draw;
                    }
                }
            }
            break;
        }
        acc += g(&tuple);
    }
    Ok(acc / m as f64)
}

// ---------------------------------------------------------------------------
// Subgroup and rotation-subsampled averages on Z² ⋊ D₄
// ---------------------------------------------------------------------------

/// Translation-only and full-group averages of a plane statistic over the
/// box of radius `n` (times the 8-element point group for the full average).
#[derive(Clone, Copy, Debug)]
pub struct SubgroupAverages {
    pub translations_only: AverageResult,
    pub full_group: AverageResult,
}

fn rotation_radius(stat_radius: i64, n: i64) -> i64 {
    // Rotated dependency regions stay inside ‖t‖∞ ≤ radius.
    n + stat_radius
}

/// Averages `f` over the translation subgroup only, and over the full
/// shift-plus-point-group set, on a field invariant under both.
pub fn subgroup_average(
    field: &MaField<2>,
    stat: &Statistic<2>,
    n: i64,
    seed: u64,
) -> SubgroupAverages {
    let r = rotation_radius(stat.radius, n);
    let win = field.sample_window(seed, [-r, -r], [r, r]);
    let translations_only = average_over_window(&win, stat, n);
    let mut acc = 0.0;
    let mut count = 0u64;
    for z in box_sites::<2>(n) {
        for rot in 0..8u8 {
            let view = dihedral_view(&win, z, rot);
            acc += stat.eval(&view);
            count += 1;
        }
    }
    let full_group = AverageResult {
        value: acc / count as f64,
        n: n as u64,
        count,
        scheme: SchemeTag::Deterministic,
        seed,
        resamples: 0,
    };
    SubgroupAverages { translations_only, full_group }
}

/// Rotation-subsampled average: `(1/(m|A_n|)) Σ_z Σ_{j≤m} f(Θ_j^z (X + z))`.
/// With `regenerate` the `m` point-group draws are fresh per shift; otherwise
/// one draw of `m` rotations is reused for every shift. `without_replacement`
/// draws distinct rotations (requires `m ≤ 8`); `m = 8` without replacement
/// reproduces the full-group average exactly.
pub fn rotation_subsampled_average(
    field: &MaField<2>,
    stat: &Statistic<2>,
    n: i64,
    m: usize,
    regenerate: bool,
    without_replacement: bool,
    seed: u64,
) -> Result<AverageResult> {
    if m == 0 {
        return Err(Error::InvalidParameter("need at least one rotation per site".into()));
    }
    if without_replacement && m > 8 {
        return Err(Error::InvalidParameter("point group has only 8 elements".into()));
    }
    let r = rotation_radius(stat.radius, n);
    let win = field.sample_window(seed, [-r, -r], [r, r]);
    let draw = |rng: &mut KeyedRng| -> Vec<u8> {
        if without_replacement {
            let mut rots: Vec<u8> = (0..8).collect();
            rng.shuffle(&mut rots);
            rots.truncate(m);
            rots.sort_unstable(); // canonical order: m = 8 matches the full loop
            rots
        } else {
            (0..m).map(|_| rng.below(8) as u8).collect()
        }
    };
    let fixed = if regenerate {
        None
    } else {
        let mut rng = KeyedRng::from_key(seed, &[stream::ROTATIONS]);
        Some(draw(&mut rng))
    };
    let mut acc = 0.0;
    let mut count = 0u64;
    for z in box_sites::<2>(n) {
        let rots = match &fixed {
            Some(r) => r.clone(),
            None => {
                let mut rng = KeyedRng::for_site(seed, stream::ROTATIONS, &[z[0], z[1]]);
                draw(&mut rng)
            }
        };
        for rot in rots {
            // Θ(X + z): shift by z then rotate, i.e. the group element (0,Θ)(z,id).
            let g_shift = d4_apply(rot, z);
            let view = dihedral_view(&win, g_shift, rot);
            acc += stat.eval(&view);
            count += 1;
        }
    }
    Ok(AverageResult {
        value: acc / count as f64,
        n: n as u64,
        count,
        scheme: SchemeTag::WithReplacement,
        seed,
        resamples: 0,
    })
}
