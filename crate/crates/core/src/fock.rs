//! Brute-force density-matrix evolution in a truncated Fock space.
//!
//! Used only as an independent check of the moment equations. The model is
//! linear, so agreement at small drive amplitude (where a handful of Fock
//! levels suffice) certifies the moment equations at every amplitude.
//!
//! Basis ordering is `|n_a⟩⊗|n_b⟩`, row-major: index `n_a·(N+1) + n_b`.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::model::SystemParams;
use crate::moments::MomentState;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Tail occupation above which the truncation is considered inadequate.
pub const TAIL_LIMIT: f64 = 1e-6;

/// Sparse operator stored by rows.
#[derive(Debug, Clone)]
struct Sparse {
    rows: Vec<Vec<(usize, C64)>>,
}

impl Sparse {
    /// Builds the matrix of `O` from its action on basis states:
    /// `act(n_a, n_b)` lists `(c, m_a, m_b)` with `O|n_a,n_b⟩ = Σ c|m_a,m_b⟩`.
    /// Images outside the truncation are dropped.
    fn from_action<F>(n: usize, act: F) -> Self
    where
        F: Fn(usize, usize) -> Vec<(C64, usize, usize)>,
    {
        let side = n + 1;
        let mut rows = vec![Vec::new(); side * side];
        for na in 0..side {
            for nb in 0..side {
                let col = na * side + nb;
                for (c, ma, mb) in act(na, nb) {
                    if c == ZERO || ma > n || mb > n {
                        continue;
                    }
                    let row: &mut Vec<(usize, C64)> = &mut rows[ma * side + mb];
                    match row.iter_mut().find(|(k, _)| *k == col) {
                        Some(entry) => entry.1 += c,
                        None => row.push((col, c)),
                    }
                }
            }
        }
        Self { rows }
    }

    /// `self · m` for dense row-major `m`.
    fn mul_dense(&self, m: &[C64], out: &mut [C64]) {
        let d = self.rows.len();
        out.iter_mut().for_each(|x| *x = ZERO);
        for (i, row) in self.rows.iter().enumerate() {
            let dst = &mut out[i * d..(i + 1) * d];
            for &(k, v) in row {
                let src = &m[k * d..(k + 1) * d];
                for (o, s) in dst.iter_mut().zip(src) {
                    *o += v * s;
                }
            }
        }
    }

    /// `out += m · self†`.
    fn add_dense_mul_adjoint(&self, m: &[C64], out: &mut [C64]) {
        let d = self.rows.len();
        for (j, row) in self.rows.iter().enumerate() {
            for &(k, v) in row {
                let vc = v.conj();
                for i in 0..d {
                    out[i * d + j] += m[i * d + k] * vc;
                }
            }
        }
    }

    /// `tr(ρ O)`.
    fn expectation(&self, rho: &[C64]) -> C64 {
        let d = self.rows.len();
        let mut acc = ZERO;
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                acc += v * rho[j * d + i];
            }
        }
        acc
    }
}

fn sqrt_n(n: usize) -> f64 {
    (n as f64).sqrt()
}

fn lower_a(na: usize, nb: usize) -> Vec<(C64, usize, usize)> {
    if na == 0 {
        vec![]
    } else {
        vec![(C64::new(sqrt_n(na), 0.0), na - 1, nb)]
    }
}

fn lower_b(na: usize, nb: usize) -> Vec<(C64, usize, usize)> {
    if nb == 0 {
        vec![]
    } else {
        vec![(C64::new(sqrt_n(nb), 0.0), na, nb - 1)]
    }
}

/// Density matrix on the `(N+1)²`-dimensional two-mode space.
#[derive(Debug, Clone, PartialEq)]
pub struct FockDensityMatrix {
    truncation: usize,
    data: Vec<C64>,
}

impl FockDensityMatrix {
    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn dim(&self) -> usize {
        (self.truncation + 1) * (self.truncation + 1)
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn from_data(truncation: usize, data: Vec<C64>) -> Result<Self> {
        let d = (truncation + 1) * (truncation + 1);
        if data.len() != d * d {
            return Err(Error::InvalidArgument(format!("expected {} entries, got {}", d * d, data.len())));
        }
        Ok(Self { truncation, data })
    }

    fn from_pure(truncation: usize, psi: &[C64]) -> Self {
        let d = psi.len();
        let mut data = vec![ZERO; d * d];
        for i in 0..d {
            for j in 0..d {
                data[i * d + j] = psi[i] * psi[j].conj();
            }
        }
        Self { truncation, data }
    }

    pub fn vacuum(truncation: usize) -> Self {
        Self::number_state(truncation, 0, 0)
    }

    pub fn number_state(truncation: usize, na: usize, nb: usize) -> Self {
        let side = truncation + 1;
        let mut psi = vec![ZERO; side * side];
        psi[na.min(truncation) * side + nb.min(truncation)] = C64::new(1.0, 0.0);
        Self::from_pure(truncation, &psi)
    }

    /// `|α⟩⊗|β⟩` truncated at `N` and renormalized.
    pub fn coherent(truncation: usize, alpha: C64, beta: C64) -> Self {
        let amplitudes = |z: C64| {
            let mut out = Vec::with_capacity(truncation + 1);
            let mut c = C64::new((-z.norm_sqr() / 2.0).exp(), 0.0);
            for n in 0..=truncation {
                if n > 0 {
                    c = c * z / sqrt_n(n);
                }
                out.push(c);
            }
            out
        };
        let (ca, cb) = (amplitudes(alpha), amplitudes(beta));
        let mut psi: Vec<C64> = ca.iter().flat_map(|x| cb.iter().map(move |y| x * y)).collect();
        let norm = psi.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        psi.iter_mut().for_each(|c| *c /= norm);
        Self::from_pure(truncation, &psi)
    }

    pub fn trace(&self) -> C64 {
        let d = self.dim();
        (0..d).map(|i| self.data[i * d + i]).sum()
    }

    /// `tr ρ²`, assuming `ρ` Hermitian.
    pub fn purity(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Probability that either mode sits in its top Fock level.
    pub fn tail_occupation(&self) -> f64 {
        let side = self.truncation + 1;
        let d = self.dim();
        let mut tail = 0.0;
        for na in 0..side {
            for nb in 0..side {
                if na == self.truncation || nb == self.truncation {
                    let i = na * side + nb;
                    tail += self.data[i * d + i].re;
                }
            }
        }
        tail
    }

    pub fn max_hermiticity_error(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self.data[i * d + j] - self.data[j * d + i].conj()).norm());
            }
        }
        worst
    }

    fn hermitize(&mut self) {
        let d = self.dim();
        for i in 0..d {
            self.data[i * d + i].im = 0.0;
            for j in i + 1..d {
                let avg = 0.5 * (self.data[i * d + j] + self.data[j * d + i].conj());
                self.data[i * d + j] = avg;
                self.data[j * d + i] = avg.conj();
            }
        }
    }
}

/// Generator of the master equation in the truncated space.
pub struct Lindbladian {
    truncation: usize,
    h_eff: Sparse,
    jumps: Vec<Sparse>,
    ops: MomentOperators,
    max_rate: f64,
}

struct MomentOperators {
    a: Sparse,
    b: Sparse,
    a_dag_b: Sparse,
}

impl MomentOperators {
    fn moments(&self, rho: &FockDensityMatrix) -> MomentState {
        let d = rho.dim();
        let side = rho.truncation + 1;
        let (mut n_a, mut n_b) = (0.0, 0.0);
        for na in 0..side {
            for nb in 0..side {
                let i = na * side + nb;
                let p = rho.data[i * d + i].re;
                n_a += na as f64 * p;
                n_b += nb as f64 * p;
            }
        }
        MomentState {
            mean_a: self.a.expectation(&rho.data),
            mean_b: self.b.expectation(&rho.data),
            n_a,
            n_b,
            cross_ab: self.a_dag_b.expectation(&rho.data),
        }
    }

    fn new(n: usize) -> Self {
        Self {
            a: Sparse::from_action(n, lower_a),
            b: Sparse::from_action(n, lower_b),
            a_dag_b: Sparse::from_action(n, |na, nb| {
                if nb == 0 {
                    vec![]
                } else {
                    vec![(C64::new(sqrt_n(na + 1) * sqrt_n(nb), 0.0), na + 1, nb - 1)]
                }
            }),
        }
    }
}

impl Lindbladian {
    pub fn new(params: &SystemParams, truncation: usize) -> Result<Self> {
        let params = params.validate()?;
        if truncation == 0 {
            return Err(Error::InvalidArgument("truncation must be at least 1".into()));
        }
        let n = truncation;
        let delta = params.drive.detuning;
        let f = params.drive.amplitude;
        let j = params.coupling.complex();
        let gamma = params.shared.gamma;
        let (pa, pb) = (params.shared.p_a, params.shared.p_b);
        let (ka, kb) = (params.local.kappa_a, params.local.kappa_b);

        // jump operators as coefficient pairs on (a, b)
        let jump_coeffs: Vec<(C64, C64)> =
            [(gamma, pa, pb), (ka, C64::new(1.0, 0.0), ZERO), (kb, ZERO, C64::new(1.0, 0.0))]
                .into_iter()
                .filter(|(rate, _, _)| *rate > 0.0)
                .map(|(rate, ca, cb)| (ca * rate.sqrt(), cb * rate.sqrt()))
                .collect();

        let h_eff = Sparse::from_action(n, |na, nb| {
            let (fa, fb) = (na as f64, nb as f64);
            let mut diag = C64::new(delta * (fa + fb), 0.0);
            let mut hop_ab = j; // coefficient of a†b
            let mut hop_ba = j.conj(); // coefficient of b†a
            for &(ca, cb) in &jump_coeffs {
                diag -= I * 0.5 * (ca.norm_sqr() * fa + cb.norm_sqr() * fb);
                hop_ab -= I * 0.5 * ca.conj() * cb;
                hop_ba -= I * 0.5 * cb.conj() * ca;
            }
            let mut out = vec![(diag, na, nb)];
            if nb > 0 {
                out.push((hop_ab * sqrt_n(na + 1) * sqrt_n(nb), na + 1, nb - 1));
            }
            if na > 0 {
                out.push((hop_ba * sqrt_n(nb + 1) * sqrt_n(na), na - 1, nb + 1));
                out.push((C64::new(f * sqrt_n(na), 0.0), na - 1, nb));
            }
            out.push((C64::new(f * sqrt_n(na + 1), 0.0), na + 1, nb));
            out
        });

        let jumps = jump_coeffs
            .iter()
            .map(|&(ca, cb)| {
                Sparse::from_action(n, |na, nb| {
                    let mut out = lower_a(na, nb);
                    out.iter_mut().for_each(|e| e.0 *= ca);
                    let mut tb = lower_b(na, nb);
                    tb.iter_mut().for_each(|e| e.0 *= cb);
                    out.extend(tb);
                    out
                })
            })
            .collect();

        let max_rate = [delta.abs() + params.coupling.magnitude, f, ka, kb, gamma * (pa.norm_sqr() + pb.norm_sqr())]
            .into_iter()
            .fold(0.0, f64::max);

        Ok(Self { truncation, h_eff, jumps, ops: MomentOperators::new(n), max_rate })
    }

    /// Largest rate of the model, used to choose the step.
    pub fn max_rate(&self) -> f64 {
        self.max_rate
    }

    /// `1e-3 / max_rate`.
    pub fn default_dt(&self) -> f64 {
        if self.max_rate > 0.0 {
            1e-3 / self.max_rate
        } else {
            1e-3
        }
    }

    /// `dρ/dt` without the truncation check. Valid for Hermitian `ρ`.
    pub fn apply_unchecked(&self, rho: &FockDensityMatrix, out: &mut Vec<C64>) {
        let d = rho.dim();
        out.resize(d * d, ZERO);
        let mut x = vec![ZERO; d * d];
        self.h_eff.mul_dense(&rho.data, &mut x);
        // −i(H_eff ρ − ρ H_eff†) with ρ H_eff† = (H_eff ρ)†
        for i in 0..d {
            for j in 0..d {
                out[i * d + j] = -I * (x[i * d + j] - x[j * d + i].conj());
            }
        }
        for l in &self.jumps {
            l.mul_dense(&rho.data, &mut x);
            l.add_dense_mul_adjoint(&x, out);
        }
    }

    /// `dρ/dt`, refusing states whose top Fock levels are populated beyond
    /// [`TAIL_LIMIT`].
    pub fn apply(&self, rho: &FockDensityMatrix) -> Result<FockDensityMatrix> {
        if rho.truncation != self.truncation {
            return Err(Error::InvalidArgument(format!(
                "state truncated at {}, generator at {}",
                rho.truncation, self.truncation
            )));
        }
        check_tail(rho)?;
        let mut out = Vec::new();
        self.apply_unchecked(rho, &mut out);
        Ok(FockDensityMatrix { truncation: rho.truncation, data: out })
    }

    pub fn moments(&self, rho: &FockDensityMatrix) -> MomentState {
        self.ops.moments(rho)
    }
}

fn check_tail(rho: &FockDensityMatrix) -> Result<()> {
    let tail = rho.tail_occupation();
    if tail > TAIL_LIMIT {
        return Err(Error::TruncationOverflow { tail, limit: TAIL_LIMIT });
    }
    Ok(())
}

/// `dρ/dt` for the given parameters.
pub fn lindblad_rhs(params: &SystemParams, rho: &FockDensityMatrix) -> Result<FockDensityMatrix> {
    Lindbladian::new(params, rho.truncation)?.apply(rho)
}

/// `⟨a⟩, ⟨b⟩, ⟨a†a⟩, ⟨b†b⟩, ⟨a†b⟩` of `ρ`.
pub fn extract_moments(rho: &FockDensityMatrix) -> MomentState {
    MomentOperators::new(rho.truncation).moments(rho)
}

fn stage_from(stage: &mut [C64], rho: &[C64], k: &[C64], h: f64) {
    for ((s, r), k) in stage.iter_mut().zip(rho).zip(k) {
        *s = r + k * h;
    }
}

/// Result of [`evolve`]: moments at each sample time and the final state.
#[derive(Debug, Clone)]
pub struct FockEvolution {
    pub times: Vec<f64>,
    pub moments: Vec<MomentState>,
    /// `tr ρ²` at each sample time.
    pub purity: Vec<f64>,
    pub final_state: FockDensityMatrix,
}

/// Fixed-step RK4 evolution of `ρ` with Hermitization after every step.
/// Sample times are `t_end·k/(samples−1)`; each interval is split into equal
/// steps no longer than `dt`.
pub fn evolve(
    params: &SystemParams,
    rho0: FockDensityMatrix,
    t_end: f64,
    dt: f64,
    samples: usize,
) -> Result<FockEvolution> {
    if !(t_end > 0.0 && t_end.is_finite() && dt > 0.0) {
        return Err(Error::InvalidArgument(format!("need t_end > 0 and dt > 0, got {t_end}, {dt}")));
    }
    let gen = Lindbladian::new(params, rho0.truncation)?;
    if dt * gen.max_rate > 0.1 {
        return Err(Error::InvalidArgument(format!("dt = {dt} does not resolve the fastest rate {}", gen.max_rate)));
    }
    let times = crate::ode::uniform_times(t_end, samples);
    let mut rho = rho0;
    let mut moments = vec![gen.moments(&rho)];
    let mut purity = vec![rho.purity()];
    let (mut k1, mut k2, mut k3, mut k4) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    let mut stage = rho.clone();
    for w in times.windows(2) {
        let n = ((w[1] - w[0]) / dt).ceil().max(1.0) as usize;
        let h = (w[1] - w[0]) / n as f64;
        for step in 0..n {
            check_tail(&rho)?;
            gen.apply_unchecked(&rho, &mut k1);
            stage_from(&mut stage.data, &rho.data, &k1, 0.5 * h);
            gen.apply_unchecked(&stage, &mut k2);
            stage_from(&mut stage.data, &rho.data, &k2, 0.5 * h);
            gen.apply_unchecked(&stage, &mut k3);
            stage_from(&mut stage.data, &rho.data, &k3, h);
            gen.apply_unchecked(&stage, &mut k4);
            for (i, r) in rho.data.iter_mut().enumerate() {
                *r += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
            }
            rho.hermitize();
            if !rho.data.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::NonFiniteState { t: w[0] + (step + 1) as f64 * h });
            }
        }
        moments.push(gen.moments(&rho));
        purity.push(rho.purity());
    }
    Ok(FockEvolution { times, moments, purity, final_state: rho })
}
