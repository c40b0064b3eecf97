//! Test-field generators: shear flows with closed-form data, seeded random
//! divergence-free states with manufactured forcing, analytic
//! harmonic-gradient solutions evaluated pointwise, and the integer
//! rescaling map.

use crate::grid::GridSpec;
use crate::nse::NseState;
use crate::operators::leray_project;
use crate::report::CheckReport;
use crate::rng::SplitMix64;
use crate::spectral::{SpectralScalar, SpectralVector};
use crate::units::Dimension;
use crate::{Error, Result};
use num_complex::Complex64;
use std::collections::BTreeMap;

/// Builds the shear state `v = (g(x_b), 0, 0)`-type with the flow along
/// `axes.0` and the profile along `axes.1`. The profile is a list of
/// `(mode, sine_amplitude)` pairs. Closed forms: `p = 0`,
/// `Q = g^2 / 2`, `f = nu curl^2 v`.
pub fn make_shear(
    grid: GridSpec,
    profile: &[(i64, f64)],
    axes: (usize, usize),
    nu: f64,
) -> Result<NseState> {
    let (flow, dep) = axes;
    if flow == dep || flow > 2 || dep > 2 {
        return Err(Error::InvalidInput(format!(
            "shear axes must be distinct and in 0..3, got ({flow}, {dep})"
        )));
    }
    for (m, _) in profile {
        if m.unsigned_abs() as usize > grid.dealias_limit() {
            return Err(Error::InvalidInput(format!(
                "shear profile mode {m} exceeds the dealias limit {}",
                grid.dealias_limit()
            )));
        }
    }
    let mut v = SpectralVector::zeros(grid).with_units(Dimension::velocity());
    for (m, amp) in profile {
        if *m == 0 {
            // mode 0 contributes a constant drift (an unforced solution)
            let mut zero = v.coeff([0, 0, 0]);
            zero[flow] += Complex64::new(*amp, 0.0);
            v.set_coeff([0, 0, 0], zero);
            continue;
        }
        // amp sin(m x_dep) = -(i amp / 2) e^{i m x} + (i amp / 2) e^{-i m x}
        let mut mode = [0i64; 3];
        mode[dep] = *m;
        let mut plus = v.coeff(mode);
        let mut minus = v.coeff([-mode[0], -mode[1], -mode[2]]);
        plus[flow] += Complex64::new(0.0, -amp / 2.0);
        minus[flow] += Complex64::new(0.0, amp / 2.0);
        v.set_coeff(mode, plus);
        v.set_coeff([-mode[0], -mode[1], -mode[2]], minus);
    }
    let label = format!("shear-{flow}{dep}-{}modes", profile.len());
    NseState::manufactured(&label, v, nu)
}

/// Seeded random band-limited divergence-free state with manufactured
/// forcing. Coefficients are drawn per mode in a fixed lattice order, so a
/// given `(seed, band)` produces the same continuum field on every grid
/// large enough to hold the band; fields are bitwise reproducible.
pub fn make_random_divfree(
    grid: GridSpec,
    seed: u64,
    band: (f64, f64),
    amplitude: f64,
    nu: f64,
) -> Result<NseState> {
    let v = random_divfree_velocity(grid, seed, band, amplitude)?;
    NseState::manufactured(&format!("random-seed{seed}"), v, nu)
}

/// The velocity part of `make_random_divfree`.
pub fn random_divfree_velocity(
    grid: GridSpec,
    seed: u64,
    band: (f64, f64),
    amplitude: f64,
) -> Result<SpectralVector> {
    let (lo, hi) = band;
    if !(0.0 < lo && lo <= hi) {
        return Err(Error::InvalidInput(format!(
            "band must satisfy 0 < lo <= hi, got ({lo}, {hi})"
        )));
    }
    if hi > grid.dealias_limit() as f64 * grid.k_unit() {
        return Err(Error::InvalidInput(format!(
            "band radius {hi} exceeds the dealias limit {}",
            grid.dealias_limit() as f64 * grid.k_unit()
        )));
    }
    let mut rng = SplitMix64::new(seed);
    let mut w = SpectralVector::zeros(grid).with_units(Dimension::velocity());
    let d = grid.dealias_limit() as i64;
    let ku = grid.k_unit();
    // Fixed mode order: lexicographic over the dealias cube, half-space
    // only (positive leading nonzero component); mirrors are conjugates.
    for k1 in -d..=d {
        for k2 in -d..=d {
            for k3 in -d..=d {
                let m = [k1, k2, k3];
                if !half_space(m) {
                    continue;
                }
                let r = ku * ((k1 * k1 + k2 * k2 + k3 * k3) as f64).sqrt();
                if r < lo || r > hi {
                    continue;
                }
                let c = [
                    Complex64::new(rng.normal(), rng.normal()),
                    Complex64::new(rng.normal(), rng.normal()),
                    Complex64::new(rng.normal(), rng.normal()),
                ];
                w.set_coeff(m, c);
                w.set_coeff(
                    [-m[0], -m[1], -m[2]],
                    [c[0].conj(), c[1].conj(), c[2].conj()],
                );
            }
        }
    }
    let mut v = leray_project(&w);
    // Normalize the amplitude to the requested nodal maximum scale.
    let max = v.max_coeff_abs();
    if max > 0.0 && amplitude > 0.0 {
        let s = amplitude / max;
        for c in 0..3 {
            for x in &mut v.comps[c] {
                *x *= s;
            }
        }
    } else if amplitude == 0.0 {
        v = SpectralVector::zeros(grid).with_units(Dimension::velocity());
    }
    v.real_flagged = true;
    Ok(v)
}

fn half_space(m: [i64; 3]) -> bool {
    if m[0] != 0 {
        return m[0] > 0;
    }
    if m[1] != 0 {
        return m[1] > 0;
    }
    m[2] > 0
}

// ---------------------------------------------------------------------------
// Harmonic-gradient analytic solutions
// ---------------------------------------------------------------------------

/// Trivariate polynomial with exact monomial bookkeeping.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly3 {
    /// (i, j, k) exponents -> coefficient.
    terms: BTreeMap<(u32, u32, u32), f64>,
}

impl Poly3 {
    pub fn zero() -> Poly3 {
        Poly3::default()
    }

    pub fn from_terms(terms: &[((u32, u32, u32), f64)]) -> Poly3 {
        let mut p = Poly3::zero();
        for (e, c) in terms {
            p.add_term(*e, *c);
        }
        p
    }

    pub fn add_term(&mut self, exps: (u32, u32, u32), coeff: f64) {
        if coeff == 0.0 {
            return;
        }
        let entry = self.terms.entry(exps).or_insert(0.0);
        *entry += coeff;
        if *entry == 0.0 {
            self.terms.remove(&exps);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_coeff(&self) -> f64 {
        self.terms.values().fold(0.0f64, |a, c| a.max(c.abs()))
    }

    pub fn partial(&self, axis: usize) -> Poly3 {
        let mut out = Poly3::zero();
        for (&(i, j, k), &c) in &self.terms {
            let (e, rest) = match axis {
                0 => (i, (i.wrapping_sub(1), j, k)),
                1 => (j, (i, j.wrapping_sub(1), k)),
                _ => (k, (i, j, k.wrapping_sub(1))),
            };
            if e > 0 {
                out.add_term(rest, c * e as f64);
            }
        }
        out
    }

    pub fn laplacian(&self) -> Poly3 {
        let mut out = Poly3::zero();
        for axis in 0..3 {
            let second = self.partial(axis).partial(axis);
            for (&e, &c) in &second.terms {
                out.add_term(e, c);
            }
        }
        out
    }

    pub fn mul(&self, other: &Poly3) -> Poly3 {
        let mut out = Poly3::zero();
        for (&(a, b, c), &x) in &self.terms {
            for (&(d, e, f), &y) in &other.terms {
                out.add_term((a + d, b + e, c + f), x * y);
            }
        }
        out
    }

    pub fn eval(&self, x: [f64; 3]) -> f64 {
        let mut acc = 0.0;
        for (&(i, j, k), &c) in &self.terms {
            acc += c * x[0].powi(i as i32) * x[1].powi(j as i32) * x[2].powi(k as i32);
        }
        acc
    }
}

/// An exact solution family evaluated pointwise: `v = grad psi` with `psi`
/// harmonic, `p = -|grad psi|^2 / 2`, `Q = 0`. All derivatives are symbolic
/// polynomials; no grid or transform is involved.
#[derive(Debug, Clone)]
pub struct HarmonicGradientSolution {
    pub psi: Poly3,
    /// Components of `v = grad psi`.
    pub velocity: [Poly3; 3],
    /// `p = -|v|^2 / 2`.
    pub pressure: Poly3,
    pub provenance: String,
}

impl HarmonicGradientSolution {
    pub fn value(&self, x: [f64; 3]) -> [f64; 3] {
        [
            self.velocity[0].eval(x),
            self.velocity[1].eval(x),
            self.velocity[2].eval(x),
        ]
    }

    /// Jacobian `J_{rc} = d_c v_r` (the Hessian of psi; symmetric).
    pub fn jacobian(&self, x: [f64; 3]) -> [[f64; 3]; 3] {
        let mut out = [[0.0; 3]; 3];
        for (r, vr) in self.velocity.iter().enumerate() {
            for c in 0..3 {
                out[r][c] = vr.partial(c).eval(x);
            }
        }
        out
    }

    /// Second derivatives `d_c d_d v_r`.
    pub fn second_derivatives(&self, x: [f64; 3]) -> [[[f64; 3]; 3]; 3] {
        let mut out = [[[0.0; 3]; 3]; 3];
        for (r, vr) in self.velocity.iter().enumerate() {
            for c in 0..3 {
                let first = vr.partial(c);
                for d in 0..3 {
                    out[r][c][d] = first.partial(d).eval(x);
                }
            }
        }
        out
    }

    /// `curl v` from the Jacobian (identically zero for gradients; computed
    /// generically).
    pub fn curl_value(&self, x: [f64; 3]) -> [f64; 3] {
        let jac = self.jacobian(x);
        [
            jac[2][1] - jac[1][2],
            jac[0][2] - jac[2][0],
            jac[1][0] - jac[0][1],
        ]
    }

    /// The stationary residual `nu curl^2 v + curl v x v + grad Q` at a
    /// point, with `Q = 0`, every term evaluated generically from symbolic
    /// derivatives.
    pub fn residual_value(&self, nu: f64, x: [f64; 3]) -> [f64; 3] {
        let second = self.second_derivatives(x);
        // curl^2 v = grad(div v) - Lap v, both terms evaluated generically.
        let mut grad_div = [0.0; 3];
        for r in 0..3 {
            for j in 0..3 {
                grad_div[r] += second[j][j][r];
            }
        }
        let mut lap = [0.0; 3];
        for r in 0..3 {
            for j in 0..3 {
                lap[r] += second[r][j][j];
            }
        }
        let curl = self.curl_value(x);
        let v = self.value(x);
        let cross = [
            curl[1] * v[2] - curl[2] * v[1],
            curl[2] * v[0] - curl[0] * v[2],
            curl[0] * v[1] - curl[1] * v[0],
        ];
        [
            nu * (grad_div[0] - lap[0]) + cross[0],
            nu * (grad_div[1] - lap[1]) + cross[1],
            nu * (grad_div[2] - lap[2]) + cross[2],
        ]
    }

    /// Self-consistency gate: the symbolic Jacobian against centered finite
    /// differences of the value at `count` seeded random points.
    pub fn jacobian_consistency_check(&self, count: usize, seed: u64) -> CheckReport {
        let mut rng = SplitMix64::new(seed);
        let h = 1e-5;
        let mut worst = 0.0f64;
        let mut scale = 0.0f64;
        for _ in 0..count {
            let x = [
                rng.uniform(-1.0, 1.0),
                rng.uniform(-1.0, 1.0),
                rng.uniform(-1.0, 1.0),
            ];
            let jac = self.jacobian(x);
            for c in 0..3 {
                let mut xp = x;
                let mut xm = x;
                xp[c] += h;
                xm[c] -= h;
                let vp = self.value(xp);
                let vm = self.value(xm);
                for r in 0..3 {
                    let fd = (vp[r] - vm[r]) / (2.0 * h);
                    worst = worst.max((jac[r][c] - fd).abs());
                    scale = scale.max(jac[r][c].abs());
                }
            }
        }
        CheckReport::residual(
            "analytic-jacobian-consistency",
            "jacobian-matches-finite-differences",
            &self.provenance,
            "pointwise",
            worst / scale.max(1.0),
            1e-6,
        )
    }
}

/// Pointwise audit of an analytic solution at seeded sample points: the
/// potential is harmonic, the field is curl-free, the stationary residual
/// vanishes with zero head pressure, and the cross-product identity holds
/// between two independently evaluated routes.
pub fn analytic_pointwise_checks(
    sol: &HarmonicGradientSolution,
    nu: f64,
    samples: usize,
    seed: u64,
) -> Vec<CheckReport> {
    let mut rng = SplitMix64::new(seed);
    let mut worst_curl = 0.0f64;
    let mut worst_residual = 0.0f64;
    let mut worst_harmonic = 0.0f64;
    let mut worst_cross = 0.0f64;
    let mut worst_deltaq = 0.0f64;
    let mut scale_v = 0.0f64;
    let mut scale_jac = 0.0f64;
    let mut scale_second = 0.0f64;
    // d(|v|^2)/dx_c as symbolic polynomials (= -2 grad p).
    let grad_vsq: Vec<Poly3> = (0..3)
        .map(|c| {
            let dp = sol.pressure.partial(c);
            let mut out = Poly3::zero();
            for (&e, &coef) in &dp.terms {
                out.add_term(e, -2.0 * coef);
            }
            out
        })
        .collect();
    for _ in 0..samples {
        let x = [
            rng.uniform(-2.0, 2.0),
            rng.uniform(-2.0, 2.0),
            rng.uniform(-2.0, 2.0),
        ];
        let v = sol.value(x);
        let jac = sol.jacobian(x);
        let second = sol.second_derivatives(x);
        let vmag = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        scale_v = scale_v.max(vmag);
        let jmag = jac.iter().flatten().fold(0.0f64, |a, c| a.max(c.abs()));
        scale_jac = scale_jac.max(jmag);
        let smag = second
            .iter()
            .flatten()
            .flatten()
            .fold(0.0f64, |a, c| a.max(c.abs()));
        scale_second = scale_second.max(smag);

        let curl = sol.curl_value(x);
        worst_curl = worst_curl.max(curl.iter().fold(0.0f64, |a, c| a.max(c.abs())));

        let r = sol.residual_value(nu, x);
        worst_residual = worst_residual.max(r.iter().fold(0.0f64, |a, c| a.max(c.abs())));

        // div v = Lap psi, evaluated generically from the Jacobian trace.
        worst_harmonic = worst_harmonic.max((jac[0][0] + jac[1][1] + jac[2][2]).abs());

        // cross identity: (curl v) x v = (v . grad) v - grad(|v|^2)/2,
        // left side from curl (vanishes), right side from two routes.
        for i in 0..3 {
            let conv: f64 = (0..3).map(|j| v[j] * jac[i][j]).sum();
            let half_grad = 0.5 * grad_vsq[i].eval(x);
            let lhs = curl[(i + 1) % 3] * v[(i + 2) % 3] - curl[(i + 2) % 3] * v[(i + 1) % 3];
            worst_cross = worst_cross.max((lhs - (conv - half_grad)).abs());
        }

        // Lap Q = |curl v|^2 - <curl^2 v, v> with Q = 0, all terms generic.
        let c2: Vec<f64> = (0..3)
            .map(|r_i| {
                let grad_div: f64 = (0..3).map(|j| second[j][j][r_i]).sum();
                let lap: f64 = (0..3).map(|j| second[r_i][j][j]).sum();
                grad_div - lap
            })
            .collect();
        let curl_sq: f64 = curl.iter().map(|c| c * c).sum();
        let bend: f64 = (0..3).map(|c| c2[c] * v[c]).sum();
        worst_deltaq = worst_deltaq.max((curl_sq - bend).abs());
    }
    let id = |tag: &str| format!("{tag}[{}]", sol.provenance);
    let rel = |w: f64, s: f64| if s > 0.0 { w / s } else { w };
    vec![
        sol.jacobian_consistency_check(100, seed ^ 0xfeed),
        CheckReport::residual(
            &id("analytic-harmonicity"),
            "harmonic-potential-trace",
            &sol.provenance,
            "pointwise",
            rel(worst_harmonic, scale_jac),
            1e-12,
        ),
        CheckReport::residual(
            &id("analytic-curl-free"),
            "gradient-field-curl-free",
            &sol.provenance,
            "pointwise",
            rel(worst_curl, scale_jac),
            1e-12,
        ),
        CheckReport::residual(
            &id("analytic-residual"),
            "stationary-residual-pointwise",
            &sol.provenance,
            "pointwise",
            rel(worst_residual, (nu * scale_second).max(scale_v * scale_jac)),
            1e-12,
        ),
        CheckReport::residual(
            &id("analytic-cross-identity"),
            "curl-cross-convective-identity",
            &sol.provenance,
            "pointwise",
            rel(worst_cross, scale_v * scale_jac),
            1e-10,
        ),
        CheckReport::residual(
            &id("analytic-deltaq"),
            "bernoulli-laplacian-unconditional",
            &sol.provenance,
            "pointwise",
            rel(
                worst_deltaq,
                (scale_v * scale_second).max(scale_jac * scale_jac),
            ),
            1e-10,
        ),
    ]
}

/// Builds the harmonic-gradient solution for a polynomial potential,
/// rejecting non-harmonic input with the symbolic Laplacian remainder.
pub fn make_harmonic_gradient(psi: Poly3, provenance: &str) -> Result<HarmonicGradientSolution> {
    let lap = psi.laplacian();
    if !lap.is_zero() {
        return Err(Error::InvalidInput(format!(
            "potential is not harmonic: symbolic Laplacian remainder has max coefficient {:.3e}",
            lap.max_coeff()
        )));
    }
    let velocity = [psi.partial(0), psi.partial(1), psi.partial(2)];
    // p = -|grad psi|^2 / 2
    let mut pressure = Poly3::zero();
    for v in &velocity {
        let sq = v.mul(v);
        for (&e, &c) in &sq.terms {
            pressure.add_term(e, -0.5 * c);
        }
    }
    Ok(HarmonicGradientSolution {
        psi,
        velocity,
        pressure,
        provenance: provenance.to_string(),
    })
}

// ---------------------------------------------------------------------------
// Integer rescaling
// ---------------------------------------------------------------------------

/// The rescaled state `w(x) = lambda v(lambda x)`, `q = lambda^2 p(lambda x)`,
/// `f_w = lambda^3 f(lambda x)`, realized on the box of length `L / lambda`
/// with the same node count; integer modes carry over unchanged, so node
/// `i` of the new grid is the image of node `i` of the old one under
/// `x -> lambda x`.
pub fn rescale(state: &NseState, lambda: u32) -> Result<NseState> {
    if lambda == 0 {
        return Err(Error::InvalidInput(
            "lambda must be a positive integer".to_string(),
        ));
    }
    let lam = lambda as f64;
    let old = state.v.grid;
    let grid = GridSpec::new(old.n(), old.length() / lam, old.dealias_limit())?;
    let mut v = SpectralVector::zeros(grid).with_units(state.v.units);
    let mut f = SpectralVector::zeros(grid).with_units(state.f.units);
    for c in 0..3 {
        for idx in 0..old.node_count() {
            v.comps[c][idx] = lam * state.v.comps[c][idx];
            f.comps[c][idx] = lam.powi(3) * state.f.comps[c][idx];
        }
    }
    v.real_flagged = state.v.real_flagged;
    f.real_flagged = state.f.real_flagged;
    NseState::with_forcing(
        &format!("{}-rescaled-x{lambda}", state.field_id),
        v,
        state.nu,
        f,
    )
}

/// Covariance of the rescaling map: the residual transforms as
/// `residual_w(x) = lambda^3 residual_v(lambda x)` node-to-node, the curl
/// energy as `||curl w||^2 = lambda ||curl v||^2` and the bending energy as
/// `||curl^2 w||^2 = lambda^3 ||curl^2 v||^2`.
pub fn scaling_covariance_check(state: &NseState, lambda: u32) -> Result<Vec<CheckReport>> {
    let rescaled = rescale(state, lambda)?;
    let lam = lambda as f64;
    let grid_label = format!("n={}", state.v.grid.n());

    let r_old = crate::nse::residual_leray(state)?;
    let r_new = crate::nse::residual_leray(&rescaled)?;
    // Node i of the new grid is the image of node i of the old one, so the
    // covariance is a coefficientwise statement: the integer-mode tables
    // satisfy r_new = lambda^3 r_old.
    let mut diff = 0.0f64;
    let mut scale = 0.0f64;
    for c in 0..3 {
        for (a, b) in r_new.comps[c].iter().zip(&r_old.comps[c]) {
            diff = diff.max((a - lam.powi(3) * b).norm());
            scale = scale.max((lam.powi(3) * b).norm()).max(a.norm());
        }
    }
    // Manufactured residuals vanish; fall back to the forcing scale.
    let scale = scale
        .max(1e-6 * rescaled.f.max_coeff_abs())
        .max(f64::MIN_POSITIVE);

    let curl_old = crate::norms::hdot_norm(&state.v, 1.0)?.value;
    let curl_new = crate::norms::hdot_norm(&rescaled.v, 1.0)?.value;
    let bend_old = crate::norms::hdot_norm(&state.v, 2.0)?.value;
    let bend_new = crate::norms::hdot_norm(&rescaled.v, 2.0)?.value;

    Ok(vec![
        CheckReport::residual(
            &format!("scaling-residual[{},lambda={lambda}]", state.field_id),
            "rescaled-residual-covariance",
            &state.field_id,
            &grid_label,
            diff / scale,
            1e-10,
        ),
        CheckReport::compare(
            "curl-energy-scaling",
            &format!("scaling-curl-energy[{},lambda={lambda}]", state.field_id),
            &state.field_id,
            &grid_label,
            curl_new * curl_new,
            lam * curl_old * curl_old,
            1e-10,
        ),
        CheckReport::compare(
            "bending-energy-scaling",
            &format!("scaling-bending-energy[{},lambda={lambda}]", state.field_id),
            &state.field_id,
            &grid_label,
            bend_new * bend_new,
            lam.powi(3) * bend_old * bend_old,
            1e-10,
        ),
    ])
}

/// Synthesizes the nodal samples of a spectral vector on its grid (used by
/// generators that need physical seeds).
pub fn nodal_velocity(v: &SpectralVector) -> Result<crate::grid::VectorField> {
    crate::spectral::inverse_vector(v)
}

/// A scalar spectral field from explicit sine modes (testing helper).
pub fn sine_scalar(grid: GridSpec, modes: &[([i64; 3], f64)]) -> SpectralScalar {
    let mut f = SpectralScalar::zeros(grid);
    for (m, amp) in modes {
        let plus = f.coeff(*m) + Complex64::new(0.0, -amp / 2.0);
        let minus = f.coeff([-m[0], -m[1], -m[2]]) + Complex64::new(0.0, amp / 2.0);
        f.set_coeff(*m, plus);
        f.set_coeff([-m[0], -m[1], -m[2]], minus);
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nse;
    use std::f64::consts::TAU;

    fn grid() -> GridSpec {
        GridSpec::new(16, TAU, 7).unwrap()
    }

    #[test]
    fn shear_has_closed_form_pressure_and_head() {
        let state = make_shear(grid(), &[(1, 1.0)], (0, 1), 0.7).unwrap();
        // p = 0
        assert!(state.p.max_coeff_abs() < 1e-13);
        // Q = sin^2(x2)/2 = 1/4 - cos(2 x2)/4
        let q = crate::spectral::inverse_scalar(&state.q).unwrap();
        let want = crate::grid::ScalarField::from_fn(grid(), |x| 0.5 * x[1].sin() * x[1].sin());
        let mut worst = 0.0f64;
        for (a, b) in q.values.iter().zip(&want.values) {
            worst = worst.max((a - b).abs());
        }
        assert!(worst < 1e-12);
        // f = nu curl^2 v = nu sin(x2) e_0
        let f = crate::spectral::inverse_vector(&state.f).unwrap();
        let mut worst_f = 0.0f64;
        for l in 0..grid().n() {
            for j in 0..grid().n() {
                for i in 0..grid().n() {
                    let x = grid().node(i, j, l);
                    let got = f.at(grid().idx(i, j, l));
                    worst_f = worst_f
                        .max((got[0] - 0.7 * x[1].sin()).abs())
                        .max(got[1].abs())
                        .max(got[2].abs());
                }
            }
        }
        assert!(worst_f < 1e-12);
        // residual vanishes by synthesis
        let r = nse::residual_leray(&state).unwrap();
        assert!(r.max_coeff_abs() < 1e-12);
    }

    #[test]
    fn constant_shear_profile_is_unforced() {
        // A constant flow v = (c, 0, 0) is a true unforced solution.
        let state = make_shear(grid(), &[(0, 0.8)], (0, 1), 1.0).unwrap();
        assert!(state.f.max_coeff_abs() < 1e-14);
        let r = crate::nse::residual_leray(&state).unwrap();
        assert!(r.max_coeff_abs() < 1e-14);
    }

    #[test]
    fn random_states_are_bitwise_reproducible() {
        let a = make_random_divfree(grid(), 9, (2.0, 5.0), 1.0, 1.0).unwrap();
        let b = make_random_divfree(grid(), 9, (2.0, 5.0), 1.0, 1.0).unwrap();
        for c in 0..3 {
            for (x, y) in a.v.comps[c].iter().zip(&b.v.comps[c]) {
                assert_eq!(x, y);
            }
        }
        // a different seed gives a different field
        let c = make_random_divfree(grid(), 10, (2.0, 5.0), 1.0, 1.0).unwrap();
        assert!(a.v.comps[0].iter().zip(&c.v.comps[0]).any(|(x, y)| x != y));
    }

    #[test]
    fn random_state_spectrum_sits_in_the_band() {
        let state = make_random_divfree(grid(), 3, (2.0, 5.0), 1.0, 1.0).unwrap();
        let support = crate::spectral::spectrum_support_vector(&state.v, 1e-13).unwrap();
        assert!(!support.is_empty());
        for m in support {
            let r = ((m[0] * m[0] + m[1] * m[1] + m[2] * m[2]) as f64).sqrt();
            assert!((2.0..=5.0).contains(&r), "mode {m:?} outside band");
        }
        // zero amplitude gives the zero state
        let z = make_random_divfree(grid(), 3, (2.0, 5.0), 0.0, 1.0).unwrap();
        assert_eq!(z.v.max_coeff_abs(), 0.0);
    }

    #[test]
    fn random_coefficients_do_not_depend_on_grid_size() {
        let small = random_divfree_velocity(grid(), 5, (2.0, 5.0), 1.0).unwrap();
        let big_grid = GridSpec::new(32, TAU, 7).unwrap();
        let big = random_divfree_velocity(big_grid, 5, (2.0, 5.0), 1.0).unwrap();
        for k3 in -7i64..=7 {
            for k2 in -7i64..=7 {
                for k1 in -7i64..=7 {
                    let a = small.coeff([k1, k2, k3]);
                    let b = big.coeff([k1, k2, k3]);
                    for c in 0..3 {
                        assert!((a[c] - b[c]).norm() < 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn harmonic_gradient_quadratic() {
        // psi = x1^2 - x2^2 -> v = (2 x1, -2 x2, 0)
        let psi = Poly3::from_terms(&[((2, 0, 0), 1.0), ((0, 2, 0), -1.0)]);
        let sol = make_harmonic_gradient(psi, "saddle").unwrap();
        let v = sol.value([0.3, -0.7, 0.2]);
        assert_eq!(v, [0.6, 1.4, 0.0]);
        assert_eq!(sol.curl_value([0.3, -0.7, 0.2]), [0.0, 0.0, 0.0]);
        let r = sol.residual_value(1.3, [0.3, -0.7, 0.2]);
        assert!(r.iter().all(|x| x.abs() < 1e-14));
        // p = -|v|^2/2 = -(0.6^2 + 1.4^2)/2 = -1.16
        assert!((sol.pressure.eval([0.3, -0.7, 0.2]) + 0.5 * (0.36 + 1.96)).abs() < 1e-12);
        assert!(sol.jacobian_consistency_check(100, 17).pass);
    }

    #[test]
    fn harmonic_gradient_linear_and_cubic() {
        let linear =
            make_harmonic_gradient(Poly3::from_terms(&[((1, 0, 0), 1.0)]), "drift").unwrap();
        assert_eq!(linear.value([0.4, 0.5, 0.6]), [1.0, 0.0, 0.0]);
        assert!((linear.pressure.eval([9.0, 9.0, 9.0]) + 0.5).abs() < 1e-15);

        let cubic = make_harmonic_gradient(Poly3::from_terms(&[((1, 1, 1), 1.0)]), "xyz").unwrap();
        let mut rng = SplitMix64::new(23);
        for _ in 0..1000 {
            let x = [
                rng.uniform(-2.0, 2.0),
                rng.uniform(-2.0, 2.0),
                rng.uniform(-2.0, 2.0),
            ];
            let r = cubic.residual_value(0.9, x);
            let v = cubic.value(x);
            let scale = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).max(1.0);
            assert!(r.iter().all(|c| c.abs() <= 1e-12 * scale));
        }
    }

    #[test]
    fn non_harmonic_potential_is_rejected() {
        let err = make_harmonic_gradient(Poly3::from_terms(&[((2, 0, 0), 1.0)]), "bad");
        assert!(err.is_err());
    }

    #[test]
    fn rescale_shear_doubles_frequency_and_scales_forcing() {
        let state = make_shear(grid(), &[(1, 1.0)], (0, 1), 1.0).unwrap();
        let rescaled = rescale(&state, 2).unwrap();
        assert!((rescaled.v.grid.length() - TAU / 2.0).abs() < 1e-15);
        // f_w(x) = 8 nu sin(2 x2) e_0 in new-box coordinates: integer mode 1
        // of the new lattice with amplitude 8.
        let f = rescaled.f.coeff([0, 1, 0]);
        assert!((f[0] - Complex64::new(0.0, -4.0)).norm() < 1e-12);
        // lambda = 1 is the identity
        let same = rescale(&state, 1).unwrap();
        for c in 0..3 {
            for (a, b) in same.v.comps[c].iter().zip(&state.v.comps[c]) {
                assert!((a - b).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn scaling_covariance_on_shear() {
        let state = make_shear(grid(), &[(1, 1.0), (3, 0.5)], (0, 1), 0.8).unwrap();
        for r in scaling_covariance_check(&state, 2).unwrap() {
            assert!(r.pass, "{}: residual {:.3e}", r.check_id, r.residual);
        }
    }
}
