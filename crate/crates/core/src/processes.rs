//! Generative invariant process models with consistent finite-window sampling
//! and analytic oracles.
//!
//! Sampling is a pure function of `(model, region, seed)`: every noise value
//! is keyed on its site, so growing the window or re-indexing a transformed
//! copy of the process reproduces overlapping values bit-exactly.

use crate::rng::{stream, KeyedRng};
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Mixing oracles
// ---------------------------------------------------------------------------

/// Analytic description of the mixing behaviour of a model/statistic pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MixingOracle {
    /// α(t) = 0 for t > radius (finite-range dependence).
    ExactZeroBeyond { radius: u64 },
    /// α(t) ≤ rate^t with rate ∈ (0,1).
    Geometric { rate: f64 },
    /// No usable information.
    None,
}

// ---------------------------------------------------------------------------
// Windows over lattice fields
// ---------------------------------------------------------------------------

/// A materialized sample of a real-valued field on a box `[lo, hi]^D`.
#[derive(Clone, Debug)]
pub struct Window<const D: usize> {
    pub lo: [i64; D],
    pub dims: [usize; D],
    pub seed: u64,
    values: Vec<f64>,
}

impl<const D: usize> Window<D> {
    pub fn new(lo: [i64; D], hi: [i64; D], seed: u64) -> Self {
        let mut dims = [0usize; D];
        for i in 0..D {
            assert!(hi[i] >= lo[i]);
            dims[i] = (hi[i] - lo[i] + 1) as usize;
        }
        let len = dims.iter().product();
        Window { lo, dims, seed, values: vec![0.0; len] }
    }

    #[inline]
    fn index(&self, site: [i64; D]) -> usize {
        let mut idx = 0usize;
        for i in 0..D {
            let off = site[i] - self.lo[i];
            debug_assert!(off >= 0 && (off as usize) < self.dims[i], "site outside window");
            idx = idx * self.dims[i] + off as usize;
        }
        idx
    }

    #[inline]
    pub fn get(&self, site: [i64; D]) -> f64 {
        self.values[self.index(site)]
    }

    #[inline]
    pub fn set(&mut self, site: [i64; D], value: f64) {
        let idx = self.index(site);
        self.values[idx] = value;
    }

    pub fn contains(&self, site: [i64; D]) -> bool {
        (0..D).all(|i| {
            let off = site[i] - self.lo[i];
            off >= 0 && (off as usize) < self.dims[i]
        })
    }

    /// Row iteration order used by CSV export: last coordinate fastest.
    pub fn sites(&self) -> Vec<[i64; D]> {
        let total: usize = self.dims.iter().product();
        let mut out = Vec::with_capacity(total);
        for mut idx in 0..total {
            let mut site = [0i64; D];
            for i in (0..D).rev() {
                site[i] = self.lo[i] + (idx % self.dims[i]) as i64;
                idx /= self.dims[i];
            }
            out.push(site);
        }
        out
    }

    /// CSV export with header `site,value`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("site,value\n");
        for site in self.sites() {
            let coords: Vec<String> = site.iter().map(|c| c.to_string()).collect();
            s.push_str(&format!("\"({})\",{}\n", coords.join(","), self.get(site)));
        }
        s
    }
}

// ---------------------------------------------------------------------------
// Moving-average random fields on Z^D
// ---------------------------------------------------------------------------

/// Innovation distribution; all options are standardized to mean 0 and unit
/// variance except `Constant`, which is the degenerate all-ones field used by
/// exactness tests.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Noise {
    Gaussian,
    Rademacher,
    Uniform,
    Constant,
}

/// Stationary moving-average field `X_t = Σ_{‖u‖∞ ≤ m} c_u ε_{t+u}` with
/// i.i.d. standardized innovations.
#[derive(Clone, Debug)]
pub struct MaField<const D: usize> {
    order: i64,
    coeffs: Vec<f64>,
    noise: Noise,
}

impl<const D: usize> MaField<D> {
    /// `coeffs` indexes the box `‖u‖∞ ≤ order` in row-major order (last
    /// coordinate fastest), matching `Window::sites`.
    pub fn new(order: u64, coeffs: Vec<f64>, noise: Noise) -> Result<Self> {
        let side = (2 * order + 1) as usize;
        let expect = side.pow(D as u32);
        if coeffs.len() != expect {
            return Err(Error::InvalidParameter(format!(
                "expected {expect} coefficients for order {order} in dimension {D}, got {}",
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("non-finite coefficient".into()));
        }
        if coeffs.iter().all(|&c| c == 0.0) {
            return Err(Error::InvalidParameter("all coefficients are zero".into()));
        }
        Ok(MaField { order: order as i64, coeffs, noise })
    }

    /// i.i.d. field (order 0, unit coefficient).
    pub fn iid(noise: Noise) -> Self {
        MaField { order: 0, coeffs: vec![1.0], noise }
    }

    /// One-sided MA(1) chain `X_t = ε_t + ε_{t+1}` when `D == 1`.
    pub fn ma1_chain(noise: Noise) -> Self {
        assert_eq!(D, 1);
        MaField { order: 1, coeffs: vec![0.0, 1.0, 1.0], noise }
    }

    /// Isotropic order-1 plane kernel with all nine coefficients `1/3`.
    pub fn isotropic_plane() -> Self {
        assert_eq!(D, 2);
        MaField { order: 1, coeffs: vec![1.0 / 3.0; 9], noise: Noise::Gaussian }
    }

    pub fn order(&self) -> u64 {
        self.order as u64
    }

    /// Dependency radius of a single field value in innovation sites.
    pub fn radius(&self) -> i64 {
        self.order
    }

    #[inline]
    pub fn eps(&self, seed: u64, site: [i64; D]) -> f64 {
        let mut rng = KeyedRng::for_site(seed, stream::NOISE, &site);
        match self.noise {
            Noise::Gaussian => rng.standard_normal(),
            Noise::Rademacher => rng.rademacher(),
            Noise::Uniform => rng.uniform_unit_var(),
            Noise::Constant => 1.0,
        }
    }

    /// Field value at one site, computed on demand. Bit-identical to the
    /// value materialized by `sample_window` (same coefficient order).
    pub fn value(&self, seed: u64, site: [i64; D]) -> f64 {
        let mut acc = 0.0;
        for (k, u) in box_offsets::<D>(self.order).enumerate() {
            let c = self.coeffs[k];
            if c != 0.0 {
                let mut s = site;
                for i in 0..D {
                    s[i] += u[i];
                }
                acc += c * self.eps(seed, s);
            }
        }
        acc
    }

    /// Materializes the field on `[lo, hi]`, computing each innovation once.
    pub fn sample_window(&self, seed: u64, lo: [i64; D], hi: [i64; D]) -> Window<D> {
        let m = self.order;
        let mut eps_lo = lo;
        let mut eps_hi = hi;
        for i in 0..D {
            eps_lo[i] -= m;
            eps_hi[i] += m;
        }
        let mut eps = Window::<D>::new(eps_lo, eps_hi, seed);
        for site in eps.sites() {
            let v = self.eps(seed, site);
            eps.set(site, v);
        }
        let mut out = Window::<D>::new(lo, hi, seed);
        for site in out.sites() {
            let mut acc = 0.0;
            for (k, u) in box_offsets::<D>(m).enumerate() {
                let c = self.coeffs[k];
                if c != 0.0 {
                    let mut s = site;
                    for i in 0..D {
                        s[i] += u[i];
                    }
                    acc += c * eps.get(s);
                }
            }
            out.set(site, acc);
        }
        out
    }

    /// Analytic covariance `Cov(X_0, X_t) = Σ_u c_u c_{u+t}`.
    pub fn covariance(&self, lag: [i64; D]) -> f64 {
        let m = self.order;
        let mut acc = 0.0;
        for (k, u) in box_offsets::<D>(m).enumerate() {
            let cu = self.coeffs[k];
            if cu == 0.0 {
                continue;
            }
            let mut shifted = u;
            let mut inside = true;
            for i in 0..D {
                shifted[i] += lag[i];
                if shifted[i].abs() > m {
                    inside = false;
                    break;
                }
            }
            if inside {
                acc += cu * self.coeff_at(shifted);
            }
        }
        acc
    }

    fn coeff_at(&self, u: [i64; D]) -> f64 {
        let side = (2 * self.order + 1) as usize;
        let mut idx = 0usize;
        for i in 0..D {
            idx = idx * side + (u[i] + self.order) as usize;
        }
        self.coeffs[idx]
    }

    /// Total asymptotic variance of the site statistic `f = X_0`:
    /// `Σ_t Cov(X_0, X_t) = (Σ_u c_u)²`.
    pub fn eta_sq_site_statistic(&self) -> f64 {
        let s: f64 = self.coeffs.iter().sum();
        s * s
    }

    pub fn mixing(&self) -> MixingOracle {
        MixingOracle::ExactZeroBeyond { radius: 2 * self.order as u64 }
    }
}

/// Offsets of the box `‖u‖∞ ≤ m` in row-major order.
pub fn box_offsets<const D: usize>(m: i64) -> impl Iterator<Item = [i64; D]> {
    let side = (2 * m + 1) as usize;
    let total = side.pow(D as u32);
    (0..total).map(move |mut idx| {
        let mut u = [0i64; D];
        for i in (0..D).rev() {
            u[i] = (idx % side) as i64 - m;
            idx /= side;
        }
        u
    })
}

// ---------------------------------------------------------------------------
// Finite-state stationary Markov chains on Z
// ---------------------------------------------------------------------------

/// Two-sided stationary Markov chain with exact conditional oracles.
#[derive(Clone, Debug)]
pub struct MarkovChain {
    k: usize,
    p: Vec<f64>,
    pi: Vec<f64>,
}

impl MarkovChain {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let k = rows.len();
        if k == 0 {
            return Err(Error::InvalidParameter("empty transition matrix".into()));
        }
        let mut p = Vec::with_capacity(k * k);
        for row in &rows {
            if row.len() != k {
                return Err(Error::InvalidParameter("transition matrix must be square".into()));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > 1e-12 || row.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
                return Err(Error::InvalidParameter(format!(
                    "row does not sum to 1 within 1e-12 (sum = {s})"
                )));
            }
            p.extend_from_slice(row);
        }
        if !is_primitive(&p, k) {
            return Err(Error::ReducibleChain);
        }
        let pi = stationary_distribution(&p, k)?;
        Ok(MarkovChain { k, p, pi })
    }

    /// i.i.d. draws from `probs` as a (trivially mixing) chain.
    pub fn iid(probs: Vec<f64>) -> Result<Self> {
        let k = probs.len();
        Self::new(vec![probs; k])
    }

    pub fn states(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn transition(&self, a: usize, b: usize) -> f64 {
        self.p[a * self.k + b]
    }

    pub fn stationary(&self) -> &[f64] {
        &self.pi
    }

    /// `m`-step transition matrix.
    pub fn power(&self, m: u64) -> Vec<f64> {
        let k = self.k;
        let mut acc = identity_matrix(k);
        let mut base = self.p.clone();
        let mut e = m;
        while e > 0 {
            if e & 1 == 1 {
                acc = mat_mul(&acc, &base, k);
            }
            base = mat_mul(&base, &base, k);
            e >>= 1;
        }
        acc
    }

    /// Samples the stationary path on `[a, b]` (inclusive). The path is
    /// anchored at site 0 and extended with forward and backward transition
    /// draws so that overlapping windows agree bit-exactly for a fixed seed.
    pub fn sample_window(&self, seed: u64, a: i64, b: i64) -> Vec<usize> {
        assert!(a <= b);
        let u = |site: i64| -> f64 {
            KeyedRng::for_site(seed, stream::CHAIN, &[site]).uniform()
        };
        let pick = |probs: &[f64], x: f64| -> usize {
            let mut acc = 0.0;
            for (i, &p) in probs.iter().enumerate() {
                acc += p;
                if x < acc {
                    return i;
                }
            }
            probs.len() - 1
        };
        let k = self.k;
        // Backward (time-reversed) transition kernel.
        let rev: Vec<f64> = (0..k * k)
            .map(|idx| {
                let (x, y) = (idx / k, idx % k);
                self.pi[y] * self.transition(y, x) / self.pi[x]
            })
            .collect();
        let mut s0 = pick(&self.pi, u(0));
        let mut path = vec![0usize; (b - a + 1) as usize];
        if a <= 0 && 0 <= b {
            path[(0 - a) as usize] = s0;
        }
        // forward from 0
        let mut cur = s0;
        for t in 1..=b.max(0) {
            let row = &self.p[cur * k..(cur + 1) * k];
            cur = pick(row, u(t));
            if t >= a {
                path[(t - a) as usize] = cur;
            }
        }
        // backward from 0
        for t in (a.min(0)..0).rev() {
            let row = &rev[s0 * k..(s0 + 1) * k];
            s0 = pick(row, u(t));
            if t <= b {
                path[(t - a) as usize] = s0;
            }
        }
        path
    }

    /// Exact joint probability of states at strictly increasing positions.
    pub fn joint_prob(&self, positions: &[i64], states: &[usize]) -> f64 {
        assert_eq!(positions.len(), states.len());
        assert!(!positions.is_empty());
        debug_assert!(positions.windows(2).all(|w| w[0] < w[1]));
        let mut prob = self.pi[states[0]];
        for i in 1..positions.len() {
            let gap = (positions[i] - positions[i - 1]) as u64;
            let step = self.power(gap);
            prob *= step[states[i - 1] * self.k + states[i]];
        }
        prob
    }

    /// Exact full conditional `P(S_0 = · | S_A = config)` for a finite
    /// conditioning set `A` (positions must exclude 0). Sums to 1 exactly up
    /// to rounding.
    pub fn conditional(&self, cond: &[(i64, usize)]) -> Vec<f64> {
        let mut entries: Vec<(i64, usize)> = cond.to_vec();
        entries.sort_by_key(|e| e.0);
        assert!(entries.iter().all(|e| e.0 != 0), "site 0 is the target");
        let mut weights = vec![0.0; self.k];
        for x in 0..self.k {
            let mut positions: Vec<i64> = entries.iter().map(|e| e.0).collect();
            let mut states: Vec<usize> = entries.iter().map(|e| e.1).collect();
            let insert = positions.partition_point(|&p| p < 0);
            positions.insert(insert, 0);
            states.insert(insert, x);
            weights[x] = self.joint_prob(&positions, &states);
        }
        let total: f64 = weights.iter().sum();
        assert!(total > 0.0, "conditioning configuration has probability zero");
        weights.iter().map(|w| w / total).collect()
    }

    /// Dobrushin interdependence coefficient by exhaustive enumeration over
    /// neighbour configurations. For an order-1 chain the full conditional at
    /// the origin depends on sites ∓1 only, so the sum has two terms.
    pub fn dobrushin_coefficient(&self) -> f64 {
        let k = self.k;
        let cond = |a: usize, b: usize| -> Vec<f64> {
            // P(x | S_-1 = a, S_1 = b) ∝ P(a, x) P(x, b)
            let mut w: Vec<f64> = (0..k)
                .map(|x| self.transition(a, x) * self.transition(x, b))
                .collect();
            let t: f64 = w.iter().sum();
            assert!(t > 0.0, "two-sided conditioning has probability zero");
            for v in w.iter_mut() {
                *v /= t;
            }
            w
        };
        let tv = |p: &[f64], q: &[f64]| -> f64 {
            0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
        };
        // Sensitivity to the left neighbour (sup over the fixed right one and
        // the modified pair), and symmetrically for the right neighbour.
        let mut left: f64 = 0.0;
        let mut right: f64 = 0.0;
        for b in 0..k {
            for a0 in 0..k {
                for a1 in 0..k {
                    left = left.max(tv(&cond(a0, b), &cond(a1, b)));
                    right = right.max(tv(&cond(b, a0), &cond(b, a1)));
                }
            }
        }
        left + right
    }

    /// Entropy rate in nats: `Σ_i π_i Σ_j P_ij (−log P_ij)`.
    pub fn entropy_rate(&self) -> f64 {
        let mut h = 0.0;
        for a in 0..self.k {
            for b in 0..self.k {
                let p = self.transition(a, b);
                if p > 0.0 {
                    h -= self.pi[a] * p * p.ln();
                }
            }
        }
        h
    }

    /// Geometric mixing oracle; the rate is the second-largest singular value
    /// of the transition matrix (1.0-capped), an upper-bound proxy for the
    /// chain's contraction coefficient.
    pub fn mixing(&self) -> MixingOracle {
        let rate = self.second_singular_value().min(0.999_999);
        if rate <= 0.0 {
            MixingOracle::ExactZeroBeyond { radius: 0 }
        } else {
            MixingOracle::Geometric { rate }
        }
    }

    pub fn second_singular_value(&self) -> f64 {
        let k = self.k;
        // Singular values of P = sqrt of eigenvalues of PᵀP.
        let mut m = vec![0.0; k * k];
        for i in 0..k {
            for j in 0..k {
                let mut s = 0.0;
                for l in 0..k {
                    s += self.p[l * k + i] * self.p[l * k + j];
                }
                m[i * k + j] = s;
            }
        }
        let mut eig = jacobi_eigenvalues(&m, k);
        eig.sort_by(|a, b| b.partial_cmp(a).unwrap());
        if k < 2 {
            return 0.0;
        }
        eig[1].max(0.0).sqrt()
    }
}

fn identity_matrix(k: usize) -> Vec<f64> {
    let mut m = vec![0.0; k * k];
    for i in 0..k {
        m[i * k + i] = 1.0;
    }
    m
}

fn mat_mul(a: &[f64], b: &[f64], k: usize) -> Vec<f64> {
    let mut out = vec![0.0; k * k];
    for i in 0..k {
        for l in 0..k {
            let v = a[i * k + l];
            if v != 0.0 {
                for j in 0..k {
                    out[i * k + j] += v * b[l * k + j];
                }
            }
        }
    }
    out
}

/// Primitivity check (irreducible + aperiodic): some power of the boolean
/// transition pattern is strictly positive. For a k-state chain it suffices
/// to check exponents up to k².
fn is_primitive(p: &[f64], k: usize) -> bool {
    let mut reach: Vec<bool> = p.iter().map(|&x| x > 0.0).collect();
    for _ in 0..(k * k) {
        if reach.iter().all(|&x| x) {
            return true;
        }
        let mut next = vec![false; k * k];
        for i in 0..k {
            for l in 0..k {
                if reach[i * k + l] {
                    for j in 0..k {
                        if p[l * k + j] > 0.0 {
                            next[i * k + j] = true;
                        }
                    }
                }
            }
        }
        if next == reach {
            return false;
        }
        reach = next;
    }
    reach.iter().all(|&x| x)
}

/// Solves πP = π, Σπ = 1 by Gaussian elimination with partial pivoting,
/// then one refinement pass through the chain. Residual kept below 1e-12.
fn stationary_distribution(p: &[f64], k: usize) -> Result<Vec<f64>> {
    // (Pᵀ − I) π = 0 with the last equation replaced by Σ π = 1.
    let n = k;
    let mut a = vec![0.0; n * (n + 1)];
    for i in 0..n {
        for j in 0..n {
            a[i * (n + 1) + j] = p[j * k + i] - if i == j { 1.0 } else { 0.0 };
        }
    }
    for j in 0..n {
        a[(n - 1) * (n + 1) + j] = 1.0;
    }
    a[(n - 1) * (n + 1) + n] = 1.0;
    // elimination
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if a[r * (n + 1) + col].abs() > a[piv * (n + 1) + col].abs() {
                piv = r;
            }
        }
        if a[piv * (n + 1) + col].abs() < 1e-300 {
            return Err(Error::ReducibleChain);
        }
        if piv != col {
            for c in 0..=n {
                a.swap(col * (n + 1) + c, piv * (n + 1) + c);
            }
        }
        let d = a[col * (n + 1) + col];
        for r in 0..n {
            if r != col {
                let f = a[r * (n + 1) + col] / d;
                if f != 0.0 {
                    for c in col..=n {
                        a[r * (n + 1) + c] -= f * a[col * (n + 1) + c];
                    }
                }
            }
        }
    }
    let mut pi: Vec<f64> = (0..n).map(|i| a[i * (n + 1) + n] / a[i * (n + 1) + i]).collect();
    // Clean up and verify.
    let s: f64 = pi.iter().sum();
    for v in pi.iter_mut() {
        *v /= s;
    }
    for (j, pv) in pi.clone().iter().enumerate() {
        let mut back = 0.0;
        for i in 0..n {
            back += pi[i] * p[i * k + j];
        }
        if (back - pv).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "stationary distribution residual {} exceeds 1e-12",
                (back - pv).abs()
            )));
        }
    }
    Ok(pi)
}

/// Jacobi eigenvalue sweep for small symmetric matrices.
fn jacobi_eigenvalues(m: &[f64], k: usize) -> Vec<f64> {
    let mut a = m.to_vec();
    for _ in 0..100 {
        let mut off = 0.0;
        let (mut p, mut q) = (0, 1);
        for i in 0..k {
            for j in i + 1..k {
                if a[i * k + j].abs() > off {
                    off = a[i * k + j].abs();
                    p = i;
                    q = j;
                }
            }
        }
        if off < 1e-14 || k < 2 {
            break;
        }
        let app = a[p * k + p];
        let aqq = a[q * k + q];
        let apq = a[p * k + q];
        let theta = 0.5 * (aqq - app) / apq;
        let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
        let c = 1.0 / (t * t + 1.0).sqrt();
        let s = t * c;
        for i in 0..k {
            let aip = a[i * k + p];
            let aiq = a[i * k + q];
            a[i * k + p] = c * aip - s * aiq;
            a[i * k + q] = s * aip + c * aiq;
        }
        for j in 0..k {
            let apj = a[p * k + j];
            let aqj = a[q * k + j];
            a[p * k + j] = c * apj - s * aqj;
            a[q * k + j] = s * apj + c * aqj;
        }
    }
    (0..k).map(|i| a[i * k + i]).collect()
}

// ---------------------------------------------------------------------------
// Stochastic block models
// ---------------------------------------------------------------------------

/// Exchangeable random graph with latent classes.
#[derive(Clone, Debug)]
pub struct SbmModel {
    pub pi: Vec<f64>,
    pub p: Vec<Vec<f64>>,
}

impl SbmModel {
    pub fn new(pi: Vec<f64>, p: Vec<Vec<f64>>) -> Result<Self> {
        let r = pi.len();
        if r == 0 || (pi.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter("class probabilities must sum to 1".into()));
        }
        if p.len() != r || p.iter().any(|row| row.len() != r) {
            return Err(Error::InvalidParameter("edge matrix must be r x r".into()));
        }
        for i in 0..r {
            for j in 0..r {
                if !(0.0..=1.0).contains(&p[i][j]) {
                    return Err(Error::InvalidParameter("edge probabilities must lie in [0,1]".into()));
                }
                if (p[i][j] - p[j][i]).abs() > 1e-15 {
                    return Err(Error::InvalidParameter("edge matrix must be symmetric".into()));
                }
            }
        }
        Ok(SbmModel { pi, p })
    }

    pub fn classes(&self) -> usize {
        self.pi.len()
    }

    /// Samples the leading `n × n` adjacency block. Per-vertex classes and
    /// per-pair edges are keyed individually, so the sample is consistent
    /// under window growth.
    pub fn sample_graph(&self, n: usize, seed: u64) -> SbmGraph {
        let classes: Vec<usize> = (0..n)
            .map(|i| {
                KeyedRng::for_site(seed, stream::CLASSES, &[i as i64]).categorical(&self.pi)
            })
            .collect();
        let mut adj = vec![false; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let u = KeyedRng::for_site(seed, stream::EDGES, &[i as i64, j as i64]).uniform();
                let edge = u < self.p[classes[i]][classes[j]];
                adj[i * n + j] = edge;
                adj[j * n + i] = edge;
            }
        }
        SbmGraph { n, classes, adj }
    }

    /// Analytic edge density `Σ_{ij} π_i π_j P_ij`.
    pub fn edge_density(&self) -> f64 {
        let r = self.classes();
        let mut d = 0.0;
        for i in 0..r {
            for j in 0..r {
                d += self.pi[i] * self.pi[j] * self.p[i][j];
            }
        }
        d
    }
}

/// A sampled adjacency block.
#[derive(Clone, Debug)]
pub struct SbmGraph {
    pub n: usize,
    pub classes: Vec<usize>,
    adj: Vec<bool>,
}

impl SbmGraph {
    #[inline]
    pub fn edge(&self, i: usize, j: usize) -> bool {
        self.adj[i * self.n + j]
    }

    /// Ordered-triple triangle density: `6·#triangles / (n(n−1)(n−2))`.
    pub fn triangle_density(&self) -> f64 {
        let n = self.n;
        let mut triangles = 0u64;
        for i in 0..n {
            for j in i + 1..n {
                if !self.edge(i, j) {
                    continue;
                }
                for k in j + 1..n {
                    if self.edge(j, k) && self.edge(i, k) {
                        triangles += 1;
                    }
                }
            }
        }
        6.0 * triangles as f64 / (n as f64 * (n as f64 - 1.0) * (n as f64 - 2.0))
    }

    /// Triangle density over a chosen vertex subset (used by exchangeability
    /// checks).
    pub fn triangle_count_on(&self, verts: &[usize]) -> u64 {
        let mut t = 0;
        for a in 0..verts.len() {
            for b in a + 1..verts.len() {
                if !self.edge(verts[a], verts[b]) {
                    continue;
                }
                for c in b + 1..verts.len() {
                    if self.edge(verts[b], verts[c]) && self.edge(verts[a], verts[c]) {
                        t += 1;
                    }
                }
            }
        }
        t
    }
}

// ---------------------------------------------------------------------------
// Graphex models
// ---------------------------------------------------------------------------

/// Symmetric edge function on ℝ₊².
#[derive(Clone)]
pub enum OmegaFn {
    Zero,
    One,
    /// `ω(u, v) = e^{−u−v}`.
    ExpNeg,
    Custom(std::sync::Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>),
}

impl std::fmt::Debug for OmegaFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OmegaFn::Zero => write!(f, "OmegaFn::Zero"),
            OmegaFn::One => write!(f, "OmegaFn::One"),
            OmegaFn::ExpNeg => write!(f, "OmegaFn::ExpNeg"),
            OmegaFn::Custom(_) => write!(f, "OmegaFn::Custom"),
        }
    }
}

impl OmegaFn {
    #[inline]
    pub fn eval(&self, u: f64, v: f64) -> f64 {
        match self {
            OmegaFn::Zero => 0.0,
            OmegaFn::One => 1.0,
            OmegaFn::ExpNeg => (-u - v).exp(),
            OmegaFn::Custom(f) => f(u, v),
        }
    }
}

/// Sparse exchangeable graph generator driven by a Poisson vertex process and
/// a symmetric edge function.
#[derive(Clone, Debug)]
pub struct GraphexModel {
    pub omega: OmegaFn,
    pub s: f64,
}

/// One sampled restriction: vertex locations (sorted), birth-time labels and
/// the induced edge list.
#[derive(Clone, Debug)]
pub struct GraphexSample {
    pub points: Vec<f64>,
    pub births: Vec<f64>,
    pub edges: Vec<(usize, usize)>,
}

impl GraphexModel {
    pub fn new(omega: OmegaFn, s: f64) -> Result<Self> {
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::InvalidParameter("graphex restriction must be positive and finite".into()));
        }
        Ok(GraphexModel { omega, s })
    }

    fn omega_checked(&self, u: f64, v: f64) -> Result<f64> {
        let w = self.omega.eval(u, v);
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::InvalidParameter(format!(
                "edge function value {w} outside [0,1] at ({u}, {v})"
            )));
        }
        Ok(w)
    }

    /// Samples the restricted graph: vertices are the points of a unit-rate
    /// Poisson process on `[0, s]` (sorted), each carrying an independent
    /// uniform birth time in `[0, s)`; edges are independent
    /// `Bernoulli(ω(U_i, U_j))` indicators.
    pub fn sample(&self, seed: u64) -> Result<GraphexSample> {
        let mut gaps = KeyedRng::from_key(seed, &[stream::POINTS, 1]);
        let mut points = Vec::new();
        let mut pos = 0.0;
        loop {
            pos += -gaps.uniform().ln();
            if pos > self.s {
                break;
            }
            points.push(pos);
        }
        let births: Vec<f64> = (0..points.len())
            .map(|i| KeyedRng::for_site(seed, stream::POINTS, &[2, i as i64]).uniform() * self.s)
            .collect();
        let mut edges = Vec::new();
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                let w = self.omega_checked(points[i], points[j])?;
                if w > 0.0 {
                    let u =
                        KeyedRng::for_site(seed, stream::EDGES, &[i as i64, j as i64]).uniform();
                    if u < w {
                        edges.push((i, j));
                    }
                }
            }
        }
        Ok(GraphexSample { points, births, edges })
    }

    /// Expected unordered edge count `½∫∫_{[0,s]²} ω` by tensorized
    /// Gauss-Legendre quadrature (independent oracle for tests lives in test
    /// code; this is the production value).
    pub fn expected_edges(&self, nodes: usize) -> Result<f64> {
        let (xs, ws) = gauss_legendre(nodes, 0.0, self.s);
        let mut acc = 0.0;
        for (i, &u) in xs.iter().enumerate() {
            for (j, &v) in xs.iter().enumerate() {
                acc += ws[i] * ws[j] * self.omega_checked(u, v)?;
            }
        }
        Ok(acc / 2.0)
    }

    /// Point count of the generated pair set over the label window: vertices
    /// carry labels below `s` and unbounded sociability coordinates, so the
    /// count of pairs `(V_i, V_j)` with an edge grows like `s²∫∫ω` and is
    /// asymptotically normal. The sociability axis is truncated where the
    /// expected number of lost pairs drops below 1e-8.
    ///
    /// Returns the ordered pair count (twice the edge count).
    pub fn label_window_pair_count(&self, seed: u64, u_max: f64) -> Result<u64> {
        // Vertex process: unit rate on [0, u_max] × [0, s) — the sociability
        // marginal is a Poisson process with intensity s per unit length.
        let mut gaps = KeyedRng::from_key(seed, &[stream::POINTS, 3]);
        let mut us = Vec::new();
        let mut pos = 0.0;
        loop {
            pos += -gaps.uniform().ln() / self.s;
            if pos > u_max {
                break;
            }
            us.push(pos);
        }
        // us is sorted ascending; ω(u_i, u_j) decays in both arguments for
        // the supported kernels, so prune pairs whose probability is below
        // 1e-15 (deterministic rule, keyed per pair: bit-reproducible).
        let mut count = 0u64;
        for i in 0..us.len() {
            for j in i + 1..us.len() {
                let w = self.omega_checked(us[i], us[j])?;
                if w < 1e-15 {
                    match self.omega {
                        // monotone kernels: all later pairs are smaller
                        OmegaFn::ExpNeg | OmegaFn::Zero => break,
                        _ => continue,
                    }
                }
                let u = KeyedRng::for_site(seed, stream::EDGES, &[i as i64, j as i64]).uniform();
                if u < w {
                    count += 2;
                }
            }
        }
        Ok(count)
    }
}

/// Gauss-Legendre nodes/weights on [a, b] by Newton iteration on Legendre
/// polynomials.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        loop {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j as f64 + 1.0) * x * p1 - j as f64 * p2) / (j as f64 + 1.0);
            }
            let dp = n as f64 * (x * p0 - p1) / (x * x - 1.0);
            let dx = p0 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                let w = 2.0 / ((1.0 - x * x) * dp * dp);
                xs[i] = x;
                ws[i] = w;
                xs[n - 1 - i] = -x;
                ws[n - 1 - i] = w;
                break;
            }
        }
    }
    let half = (b - a) / 2.0;
    let mid = (a + b) / 2.0;
    (xs.iter().map(|&x| mid - half * x).collect(), ws.iter().map(|&w| w * half).collect())
}
