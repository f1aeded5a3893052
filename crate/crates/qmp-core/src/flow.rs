//! Dense pure states, one-body marginals and the moment-map gradient flow.
//!
//! A flow step applies `⊗_k exp(−Δt (ρ_k − I/d_k))` and renormalizes. The
//! shifted variant couples each qubit to a spin-`j` auxiliary factor so the
//! limit is the point of the orbit-closure polytope nearest to a target.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::exact::{q_to_f64, qi, qr, rationalize, Q};
use crate::polytope::{HalfSpace, Membership, Polytope};

/// Normalized state vector over the product basis, row-major (first factor most significant).
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    dims: Vec<usize>,
    amps: Vec<Complex64>,
}

impl PureState {
    /// Normalizes `amps`; rejects length mismatches and the zero vector.
    pub fn new(dims: Vec<usize>, amps: Vec<Complex64>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::Invalid("dims must be nonempty and positive".into()));
        }
        let total: usize = dims.iter().product();
        if amps.len() != total {
            return Err(Error::Invalid(format!("expected {total} amplitudes, got {}", amps.len())));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Invalid("state vector has zero or non-finite norm".into()));
        }
        Ok(PureState { dims, amps: amps.into_iter().map(|a| a / norm).collect() })
    }

    pub fn from_real(dims: Vec<usize>, amps: &[f64]) -> Result<Self> {
        PureState::new(dims, amps.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn product_zero(dims: &[usize]) -> Result<Self> {
        let total: usize = dims.iter().product();
        let mut a = vec![Complex64::new(0.0, 0.0); total];
        a[0] = Complex64::new(1.0, 0.0);
        PureState::new(dims.to_vec(), a)
    }

    pub fn ghz(n: usize) -> Self {
        let mut a = vec![0.0; 1 << n];
        a[0] = 1.0;
        a[(1 << n) - 1] = 1.0;
        PureState::from_real(vec![2; n], &a).expect("valid GHZ")
    }

    pub fn w(n: usize) -> Self {
        let mut a = vec![0.0; 1 << n];
        for k in 0..n {
            a[1 << k] = 1.0;
        }
        PureState::from_real(vec![2; n], &a).expect("valid W")
    }

    /// Symmetric `n`-qubit state from amplitudes on Dicke states `|D_m⟩`, `m` = number of ones.
    pub fn from_dicke(n: usize, coeffs: &[Complex64]) -> Result<Self> {
        if coeffs.len() != n + 1 {
            return Err(Error::Invalid("need n+1 Dicke amplitudes".into()));
        }
        let mut a = vec![Complex64::new(0.0, 0.0); 1 << n];
        for (x, amp) in a.iter_mut().enumerate() {
            let m = (x as u64).count_ones() as usize;
            let binom = crate::exact::binomial(n as i64, m as i64);
            let b: f64 = binom.to_string().parse().expect("small binomial");
            *amp = coeffs[m] / b.sqrt();
        }
        PureState::new(vec![2; n], a)
    }

    fn apply_local(&mut self, k: usize, op: &DMatrix<Complex64>) {
        let d = self.dims[k];
        let inner: usize = self.dims[k + 1..].iter().product();
        let outer: usize = self.dims[..k].iter().product();
        let mut buf = vec![Complex64::new(0.0, 0.0); d];
        for o in 0..outer {
            for i in 0..inner {
                let base = o * d * inner + i;
                for (r, b) in buf.iter_mut().enumerate() {
                    *b = (0..d).map(|c| op[(r, c)] * self.amps[base + c * inner]).sum();
                }
                for (r, b) in buf.iter().enumerate() {
                    self.amps[base + r * inner] = *b;
                }
            }
        }
    }

    fn renormalize(&mut self) {
        let norm = self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in self.amps.iter_mut() {
            *a /= norm;
        }
    }

    /// Applies a local operator to factor `k` and renormalizes.
    pub fn apply(&self, k: usize, op: &DMatrix<Complex64>) -> Result<PureState> {
        if k >= self.dims.len() || op.nrows() != self.dims[k] || op.ncols() != self.dims[k] {
            return Err(Error::Invalid("operator shape does not match factor".into()));
        }
        let mut s = self.clone();
        s.apply_local(k, op);
        s.renormalize();
        Ok(s)
    }
}

/// One-body reduced density matrices and their spectra (weakly decreasing).
#[derive(Clone, Debug)]
pub struct MarginalSet {
    pub rhos: Vec<DMatrix<Complex64>>,
    pub spectra: Vec<Vec<f64>>,
}

impl MarginalSet {
    /// Largest eigenvalue of each marginal.
    pub fn max_eigenvalues(&self) -> Vec<f64> {
        self.spectra.iter().map(|s| s[0]).collect()
    }

    /// Spectra with the last eigenvalue of each factor dropped.
    pub fn reduced_spectra(&self) -> Vec<f64> {
        self.spectra.iter().flat_map(|s| s[..s.len() - 1].iter().copied()).collect()
    }
}

pub fn marginals(psi: &PureState) -> MarginalSet {
    let dims = &psi.dims;
    let mut rhos = Vec::with_capacity(dims.len());
    let mut spectra = Vec::with_capacity(dims.len());
    for k in 0..dims.len() {
        let d = dims[k];
        let inner: usize = dims[k + 1..].iter().product();
        let outer: usize = dims[..k].iter().product();
        let mut rho = DMatrix::from_element(d, d, Complex64::new(0.0, 0.0));
        for o in 0..outer {
            for i in 0..inner {
                let base = o * d * inner + i;
                for r in 0..d {
                    let a = psi.amps[base + r * inner];
                    for c in 0..d {
                        rho[(r, c)] += a * psi.amps[base + c * inner].conj();
                    }
                }
            }
        }
        spectra.push(hermitian_spectrum(&rho));
        rhos.push(rho);
    }
    MarginalSet { rhos, spectra }
}

fn hermitian_spectrum(m: &DMatrix<Complex64>) -> Vec<f64> {
    let eig = m.clone().symmetric_eigen();
    let mut v: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    v.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));
    v
}

/// `exp(s·A)` for Hermitian `A` and real `s`.
fn hermitian_exp(a: &DMatrix<Complex64>, s: f64) -> DMatrix<Complex64> {
    let eig = a.clone().symmetric_eigen();
    let v = &eig.eigenvectors;
    let d = DMatrix::from_diagonal(&DVector::from_iterator(a.nrows(), eig.eigenvalues.iter().map(|&l| Complex64::new((s * l).exp(), 0.0))));
    v * d * v.adjoint()
}

/// `exp(−iθ A)` for Hermitian `A`.
fn unitary_exp(a: &DMatrix<Complex64>, theta: f64) -> DMatrix<Complex64> {
    let eig = a.clone().symmetric_eigen();
    let v = &eig.eigenvectors;
    let d = DMatrix::from_diagonal(&DVector::from_iterator(a.nrows(), eig.eigenvalues.iter().map(|&l| Complex64::from_polar(1.0, -theta * l))));
    v * d * v.adjoint()
}

/// `E = 1 − (1/n) Σ_k tr ρ_k²`.
pub fn linear_entropy(ms: &MarginalSet) -> f64 {
    let n = ms.rhos.len() as f64;
    1.0 - ms.rhos.iter().map(purity).sum::<f64>() / n
}

fn purity(rho: &DMatrix<Complex64>) -> f64 {
    rho.iter().map(|z| z.norm_sqr()).sum()
}

/// `‖μ_K‖² = Σ_k ‖ρ_k − I/d_k‖²`.
pub fn moment_norm2(ms: &MarginalSet) -> f64 {
    ms.rhos.iter().map(|r| purity(r) - 1.0 / r.nrows() as f64).sum()
}

fn traceless(rho: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let d = rho.nrows();
    rho - DMatrix::identity(d, d) * Complex64::new(1.0 / d as f64, 0.0)
}

/// One step `ψ ↦ ⊗_k exp(−Δt (ρ_k − I/d_k)) ψ`, renormalized.
pub fn flow_step(psi: &PureState, dt: f64) -> PureState {
    let ms = marginals(psi);
    let mut s = psi.clone();
    for (k, rho) in ms.rhos.iter().enumerate() {
        s.apply_local(k, &hermitian_exp(&traceless(rho), -dt));
    }
    s.renormalize();
    s
}

#[derive(Clone, Debug)]
pub struct FlowOptions {
    pub dt: f64,
    pub tol: f64,
    pub window: usize,
    pub max_steps: usize,
    pub min_dt: f64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions { dt: 0.1, tol: 1e-10, window: 50, max_steps: 20_000, min_dt: 1e-9 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TracePoint {
    pub step: usize,
    pub lambda: Vec<f64>,
    pub norm2: f64,
    pub entropy: f64,
}

#[derive(Clone, Debug, Default)]
pub struct FlowTrace {
    pub points: Vec<TracePoint>,
}

impl FlowTrace {
    pub fn is_monotone(&self) -> bool {
        self.points.windows(2).all(|w| w[1].norm2 <= w[0].norm2 + 1e-15)
    }
}

#[derive(Clone, Debug)]
pub struct FlowResult {
    pub state: PureState,
    pub marginals: MarginalSet,
    pub trace: FlowTrace,
    pub converged: bool,
}

fn trace_point(step: usize, ms: &MarginalSet) -> TracePoint {
    TracePoint { step, lambda: ms.max_eigenvalues(), norm2: moment_norm2(ms), entropy: linear_entropy(ms) }
}

/// Runs the flow with step halving until the norm stalls over the window.
pub fn flow_to_minimum(psi: &PureState, opts: &FlowOptions) -> FlowResult {
    let mut state = psi.clone();
    let mut ms = marginals(&state);
    let mut trace = FlowTrace { points: vec![trace_point(0, &ms)] };
    let mut dt = opts.dt;
    let mut converged = false;
    for step in 1..=opts.max_steps {
        let cur = moment_norm2(&ms);
        let mut accepted = None;
        while dt >= opts.min_dt {
            let cand = flow_step(&state, dt);
            let cms = marginals(&cand);
            if moment_norm2(&cms) <= cur {
                accepted = Some((cand, cms));
                break;
            }
            dt /= 2.0;
        }
        let Some((s, m)) = accepted else {
            // No decreasing step exists at machine precision: a critical point.
            converged = true;
            break;
        };
        state = s;
        ms = m;
        trace.points.push(trace_point(step, &ms));
        let n = trace.points.len();
        if n > opts.window && trace.points[n - 1 - opts.window].norm2 - trace.points[n - 1].norm2 < opts.tol {
            converged = true;
            break;
        }
    }
    FlowResult { state, marginals: ms, trace, converged }
}

/// Deterministic random generator for a seed.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_complex<R: Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// Unitarily invariant random state (normalized complex Gaussian vector).
pub fn haar_sample_with<R: Rng>(dims: &[usize], rng: &mut R) -> PureState {
    let total: usize = dims.iter().product();
    let a: Vec<Complex64> = (0..total).map(|_| gaussian_complex(rng)).collect();
    PureState::new(dims.to_vec(), a).expect("Gaussian vector is nonzero")
}

pub fn haar_sample(dims: &[usize], seed: u64) -> PureState {
    haar_sample_with(dims, &mut rng_from_seed(seed))
}

/// Haar-random state in `Sym^n(C²)`, embedded in `(C²)^{⊗n}`.
pub fn haar_symmetric_with<R: Rng>(n: usize, rng: &mut R) -> PureState {
    let c: Vec<Complex64> = (0..=n).map(|_| gaussian_complex(rng)).collect();
    PureState::from_dicke(n, &c).expect("Gaussian vector is nonzero")
}

/// Spin-`j` matrices `(J_x, J_y, J_z)` in the basis `m = j, j−1, …, −j`; `two_j = 2j`.
pub fn spin_matrices(two_j: usize) -> [DMatrix<Complex64>; 3] {
    let n = two_j + 1;
    let j = two_j as f64 / 2.0;
    let mut jz = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    let mut jp = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for a in 0..n {
        let m = j - a as f64;
        jz[(a, a)] = Complex64::new(m, 0.0);
        if a > 0 {
            // J_+ |m⟩ = sqrt(j(j+1) − m(m+1)) |m+1⟩, and |m+1⟩ has index a−1.
            jp[(a - 1, a)] = Complex64::new((j * (j + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
        }
    }
    let jm = jp.adjoint();
    let jx = (&jp + &jm) * Complex64::new(0.5, 0.0);
    let jy = (&jp - &jm) * Complex64::new(0.0, -0.5);
    [jx, jy, jz]
}

#[derive(Clone, Debug)]
pub struct ShiftedOptions {
    pub k: usize,
    pub restarts: usize,
    pub flow: FlowOptions,
    pub seed: u64,
}

impl Default for ShiftedOptions {
    fn default() -> Self {
        ShiftedOptions { k: 0, restarts: 4, flow: FlowOptions { max_steps: 4000, ..FlowOptions::default() }, seed: 7 }
    }
}

#[derive(Clone, Debug)]
pub struct ShiftedResult {
    /// Max-eigenvalue coordinates of the limit.
    pub mu: Vec<f64>,
    pub norm2: f64,
    pub converged: bool,
}

fn pauli_components(m: &DMatrix<Complex64>) -> [f64; 3] {
    // m = a·σ for traceless Hermitian 2×2 m.
    [m[(0, 1)].re, -m[(0, 1)].im, m[(0, 0)].re]
}

fn pauli(a: [f64; 3]) -> DMatrix<Complex64> {
    DMatrix::from_row_slice(
        2,
        2,
        &[Complex64::new(a[2], 0.0), Complex64::new(a[0], -a[1]), Complex64::new(a[0], a[1]), Complex64::new(-a[2], 0.0)],
    )
}

/// Smallest `k` with `k(2ν_k − 1)` integral for all factors.
pub fn shift_level(nu: &[Q]) -> usize {
    let mut l = num_bigint::BigInt::from(1);
    for v in nu {
        let p = v * qi(2) - qi(1);
        l = crate::exact::lcm_z(&l, p.denom());
    }
    l.to_string().parse().unwrap_or(1)
}

/// Point of the orbit-closure polytope of a qubit state nearest to `nu` (max-eigenvalue coordinates).
pub fn shifted_flow(psi: &PureState, nu: &[Q], opts: &ShiftedOptions) -> Result<ShiftedResult> {
    if psi.dims.iter().any(|&d| d != 2) {
        return Err(Error::Invalid("the shifted flow supports qubit systems only".into()));
    }
    let n = psi.dims.len();
    if nu.len() != n {
        return Err(Error::Invalid("target has the wrong number of coordinates".into()));
    }
    let k = if opts.k == 0 { shift_level(nu) } else { opts.k };
    let kq = qi(k as i64);
    let mut two_j = Vec::with_capacity(n);
    for v in nu {
        let m = (v * qi(2) - qi(1)) * &kq;
        if !m.is_integer() || m < qi(0) {
            return Err(Error::Invalid(format!("k·(2ν−1) must be a nonnegative integer, got {m}")));
        }
        two_j.push(m.to_integer().to_string().parse::<usize>().expect("small spin"));
    }
    let spins: Vec<[DMatrix<Complex64>; 3]> = two_j.iter().map(|&t| spin_matrices(t)).collect();
    let mut rng = rng_from_seed(opts.seed);
    let mut best: Option<ShiftedResult> = None;
    let target: Vec<f64> = nu.iter().map(q_to_f64).collect();
    for _ in 0..opts.restarts.max(1) {
        // Random SU(2) rotation of the lowest-weight vector of each auxiliary factor.
        let mut phis: Vec<DVector<Complex64>> = Vec::with_capacity(n);
        for (f, s) in spins.iter().enumerate() {
            let dim = two_j[f] + 1;
            let mut v = DVector::from_element(dim, Complex64::new(0.0, 0.0));
            v[dim - 1] = Complex64::new(1.0, 0.0);
            let q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
            let qn = q.iter().map(|x| x * x).sum::<f64>().sqrt();
            let theta = 2.0 * (q[0] / qn).clamp(-1.0, 1.0).acos();
            let axis_norm = (q[1] * q[1] + q[2] * q[2] + q[3] * q[3]).sqrt().max(1e-300);
            let gen = (&s[0] * Complex64::new(q[1] / axis_norm, 0.0)) + (&s[1] * Complex64::new(q[2] / axis_norm, 0.0)) + (&s[2] * Complex64::new(q[3] / axis_norm, 0.0));
            phis.push(unitary_exp(&gen, theta) * v);
        }
        let res = run_shifted(psi, &mut phis, &spins, k as f64, &opts.flow);
        let dist = |r: &ShiftedResult| r.mu.iter().zip(&target).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
        if best.as_ref().map_or(true, |b| dist(&res) < dist(b)) {
            best = Some(res);
        }
    }
    Ok(best.expect("at least one restart"))
}

fn shifted_moment(ms: &MarginalSet, phis: &[DVector<Complex64>], spins: &[[DMatrix<Complex64>; 3]], k: f64) -> Vec<[f64; 3]> {
    ms.rhos
        .iter()
        .zip(phis.iter().zip(spins))
        .map(|(rho, (phi, s))| {
            let base = pauli_components(&traceless(rho));
            let mut a = [0.0; 3];
            for i in 0..3 {
                let ev = (phi.adjoint() * &s[i] * phi)[(0, 0)].re;
                a[i] = k * base[i] + ev;
            }
            a
        })
        .collect()
}

fn run_shifted(psi: &PureState, phis: &mut [DVector<Complex64>], spins: &[[DMatrix<Complex64>; 3]], k: f64, opts: &FlowOptions) -> ShiftedResult {
    let norm_of = |mu: &[[f64; 3]]| -> f64 { mu.iter().map(|a| 2.0 * (a[0] * a[0] + a[1] * a[1] + a[2] * a[2])).sum() };
    let mut state = psi.clone();
    let mut ms = marginals(&state);
    let mut mu = shifted_moment(&ms, phis, spins, k);
    let mut cur = norm_of(&mu);
    let mut history = vec![cur];
    let mut dt = opts.dt;
    let mut converged = false;
    for _ in 0..opts.max_steps {
        let mut accepted = false;
        while dt >= opts.min_dt {
            let mut cand = state.clone();
            let mut cphis: Vec<DVector<Complex64>> = phis.to_vec();
            for (f, a) in mu.iter().enumerate() {
                cand.apply_local(f, &hermitian_exp(&pauli(*a), -dt));
                let gen = (&spins[f][0] * Complex64::new(a[0], 0.0)) + (&spins[f][1] * Complex64::new(a[1], 0.0)) + (&spins[f][2] * Complex64::new(a[2], 0.0));
                let v = hermitian_exp(&gen, -2.0 * dt) * &cphis[f];
                let nv = v.norm();
                cphis[f] = v / Complex64::new(nv, 0.0);
            }
            cand.renormalize();
            let cms = marginals(&cand);
            let cmu = shifted_moment(&cms, &cphis, spins, k);
            let cn = norm_of(&cmu);
            if cn <= cur {
                state = cand;
                ms = cms;
                mu = cmu;
                cur = cn;
                phis.clone_from_slice(&cphis);
                accepted = true;
                break;
            }
            dt /= 2.0;
        }
        if !accepted {
            converged = true;
            break;
        }
        history.push(cur);
        let h = history.len();
        if h > opts.window && history[h - 1 - opts.window] - history[h - 1] < opts.tol {
            converged = true;
            break;
        }
    }
    ShiftedResult { mu: ms.max_eigenvalues(), norm2: cur, converged }
}

#[derive(Clone, Debug)]
pub struct RefineResult {
    /// Polytope in max-eigenvalue coordinates.
    pub polytope: Polytope,
    pub complete: bool,
    pub rounds: usize,
}

#[derive(Clone, Debug)]
pub struct RefineOptions {
    pub max_rounds: usize,
    pub max_den: i64,
    pub shifted: ShiftedOptions,
}

impl Default for RefineOptions {
    fn default() -> Self {
        RefineOptions { max_rounds: 40, max_den: 64, shifted: ShiftedOptions::default() }
    }
}

/// Alternates outer cuts and inner certified points until they agree.
pub fn polytope_refine(psi: &PureState, opts: &RefineOptions) -> Result<RefineResult> {
    if psi.dims.iter().any(|&d| d != 2) {
        return Err(Error::Invalid("polytope refinement supports qubit systems only".into()));
    }
    let n = psi.dims.len();
    let rat = |x: &[f64]| -> Vec<Q> { x.iter().map(|&v| rationalize(v, opts.max_den)).collect() };
    let mut cuts: Vec<HalfSpace> = Vec::new();
    for i in 0..n {
        let mut e = vec![qi(0); n];
        e[i] = qi(1);
        cuts.push(HalfSpace::new(e.clone(), qr(1, 2))?);
        cuts.push(HalfSpace::new(e.iter().map(|x| -x).collect(), qi(-1))?);
    }
    let mut inner: Vec<Vec<Q>> = vec![rat(&marginals(psi).max_eigenvalues())];
    for round in 1..=opts.max_rounds {
        let outer = Polytope::from_halfspaces(&cuts, n)?;
        let pending: Vec<Vec<Q>> = outer.vertices.iter().filter(|v| !inner.contains(v)).cloned().collect();
        let Some(nu) = pending.first() else {
            return Ok(RefineResult { polytope: outer, complete: true, rounds: round - 1 });
        };
        let res = shifted_flow(psi, nu, &opts.shifted)?;
        let mu = rat(&res.mu);
        if &mu == nu {
            inner.push(nu.clone());
            continue;
        }
        let normal: Vec<Q> = nu.iter().zip(&mu).map(|(a, b)| b - a).collect();
        let offset = crate::exact::dot(&normal, &mu);
        let cut = HalfSpace::new(normal, offset)?.normalized();
        if !cut.contains(&mu) || cut.contains(nu) || matches!(outer.membership(&mu), Membership::Outside(_)) {
            return Err(Error::NonConvergence { steps: round, last: res.norm2 });
        }
        cuts.push(cut);
        if !inner.contains(&mu) {
            inner.push(mu);
        }
    }
    let outer = Polytope::from_halfspaces(&cuts, n)?;
    Ok(RefineResult { polytope: outer, complete: false, rounds: opts.max_rounds })
}

/// State with amplitudes given as `[re, im]` pairs.
pub fn state_from_pairs(dims: Vec<usize>, pairs: &[[f64; 2]]) -> Result<PureState> {
    PureState::new(dims, pairs.iter().map(|p| Complex64::new(p[0], p[1])).collect())
}

pub fn uniform_in<R: Rng>(rng: &mut R) -> f64 {
    rand_distr::Uniform::new(0.0, 1.0).sample(rng)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn marginal_spectra() {
        let m = marginals(&PureState::w(3));
        for s in &m.spectra {
            assert!((s[0] - 2.0 / 3.0).abs() < 1e-12 && (s[1] - 1.0 / 3.0).abs() < 1e-12);
        }
        assert!((linear_entropy(&m) - 4.0 / 9.0).abs() < 1e-12);
        let g = marginals(&PureState::ghz(3));
        assert!((linear_entropy(&g) - 0.5).abs() < 1e-12);
        let p = marginals(&PureState::product_zero(&[2, 3]).unwrap());
        assert!(linear_entropy(&p).abs() < 1e-12);
    }

    #[test]
    fn spin_algebra() {
        let [jx, jy, jz] = spin_matrices(3);
        let comm = &jx * &jy - &jy * &jx;
        let diff = comm - &jz * Complex64::new(0.0, 1.0);
        assert!(diff.norm() < 1e-12);
        let casimir = &jx * &jx + &jy * &jy + &jz * &jz;
        assert!((casimir[(0, 0)].re - 1.5 * 2.5).abs() < 1e-12);
    }

    #[test]
    fn dicke_embedding() {
        let s = PureState::from_dicke(2, &[Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]).unwrap();
        let a = s.amplitudes();
        assert!((a[1].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12 && (a[2].re - a[1].re).abs() < 1e-15);
    }
}
