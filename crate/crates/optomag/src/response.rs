//! First-order polarizabilities of the five-level scheme, homogeneous and
//! Doppler broadening, and a Kramers-Kronig consistency check.
//!
//! The four response coefficients relate the induced polarization and
//! magnetization to the probe fields,
//! P = rho (aEE E + aEB B), M = rho (aBE E + aBB B),
//! and share two dressed denominators
//! D_E = (gamma42 + i nu42)(gamma34 + i nu34) + |Omega_c|^2/4 and
//! D_B = (gamma31 + i nu31)(gamma21 + i nu21) + |Omega_c|^2/4.
//! A homogeneous width gamma_p enters through the substitutions
//! gamma21 -> gamma21 + gamma_p, gamma34 -> gamma34 + gamma_p,
//! gamma31 -> gamma31 + 2 gamma_p while gamma42 stays unbroadened
//! (levels |2> and |4> dephase together).

use crate::constants::HBAR;
use crate::error::{Error, Result};
use crate::params::{CoherenceDetunings, DarkStateSolution, ProbeDetunings, SystemParams};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// The four complex polarizabilities (cm^3) at one detuning point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizabilityQuartet {
    pub a_ee: Complex64,
    pub a_eb: Complex64,
    pub a_be: Complex64,
    pub a_bb: Complex64,
}

impl PolarizabilityQuartet {
    pub fn components(&self) -> [Complex64; 4] {
        [self.a_ee, self.a_eb, self.a_be, self.a_bb]
    }
}

/// Homogeneous width plus Gaussian (Doppler) width and quadrature order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BroadeningSpec {
    /// Homogeneous dephasing width gamma_p (rad/s).
    pub gammap: f64,
    /// Gaussian 1/e half-width of the Doppler shift distribution (rad/s).
    pub doppler_sigma: f64,
    /// Gauss-Hermite node count, odd.
    pub doppler_nodes: usize,
}

impl BroadeningSpec {
    pub const DEFAULT_NODES: usize = 41;

    pub fn homogeneous(gammap: f64) -> Result<Self> {
        Self::new(gammap, 0.0, Self::DEFAULT_NODES)
    }

    pub fn new(gammap: f64, doppler_sigma: f64, doppler_nodes: usize) -> Result<Self> {
        if gammap < 0.0 {
            return Err(Error::NegativeRate(gammap));
        }
        if doppler_sigma < 0.0 {
            return Err(Error::NegativeWidth(doppler_sigma));
        }
        if doppler_nodes == 0 || doppler_nodes % 2 == 0 {
            return Err(Error::BadNodeCount(doppler_nodes));
        }
        Ok(BroadeningSpec { gammap, doppler_sigma, doppler_nodes })
    }

    pub fn none() -> Self {
        BroadeningSpec { gammap: 0.0, doppler_sigma: 0.0, doppler_nodes: Self::DEFAULT_NODES }
    }
}

/// The gamma_p-substituted coherence widths entering the denominators.
pub(crate) struct BroadenedRates {
    pub g42: f64,
    pub g34: f64,
    pub g21: f64,
    pub g31: f64,
}

pub(crate) fn broadened_rates(params: &SystemParams, gammap: f64) -> BroadenedRates {
    BroadenedRates {
        g42: params.gamma_ij(4, 2),
        g34: params.gamma_ij(3, 4) + gammap,
        g21: params.gamma_ij(2, 1) + gammap,
        g31: params.gamma_ij(3, 1) + 2.0 * gammap,
    }
}

/// Quartet evaluated at explicit coherence detunings. Doppler averaging is
/// performed over this entry point.
pub fn quartet_at(
    params: &SystemParams,
    nu: &CoherenceDetunings,
    dark: &DarkStateSolution,
    gammap: f64,
) -> Result<PolarizabilityQuartet> {
    let rates = broadened_rates(params, gammap);
    let omc = params.rabic();
    let omc2_4 = Complex64::new(params.rabic_abs * params.rabic_abs / 4.0, 0.0);
    let d42 = Complex64::new(rates.g42, nu.nu42);
    let d34 = Complex64::new(rates.g34, nu.nu34);
    let d21 = Complex64::new(rates.g21, nu.nu21);
    let d31 = Complex64::new(rates.g31, nu.nu31);
    let den_e = d42 * d34 + omc2_4;
    let den_b = d31 * d21 + omc2_4;
    // scale against which a vanishing denominator is judged
    let scale = (rates.g34 * rates.g34 + nu.nu34 * nu.nu34).max(params.rabic_abs.powi(2) / 4.0);
    if den_e.norm() < 1e-300 || den_e.norm() < 1e-15 * scale {
        return Err(Error::SingularResponse(den_e.norm()));
    }
    if den_b.norm() < 1e-300 || den_b.norm() < 1e-15 * scale {
        return Err(Error::SingularResponse(den_b.norm()));
    }
    let i = Complex64::i();
    let pref_ee = i * params.d34 * params.d34 * dark.rho44 / (2.0 * HBAR);
    let pref_bb = i * params.mu21 * params.mu21 * dark.rho11 / (2.0 * HBAR);
    let pref_x = -params.d34 * params.mu21 * dark.rho41 / (4.0 * HBAR);
    Ok(PolarizabilityQuartet {
        a_ee: pref_ee * d42 / den_e,
        a_bb: pref_bb * d31 / den_b,
        a_eb: pref_x * omc / den_e,
        a_be: pref_x * omc.conj() / den_b,
    })
}

/// First-order polarizabilities at the given detunings, with the
/// homogeneous width folded in analytically. Requires the closed-loop
/// resonance (checked by the caller via `resonance_check`); the detuning
/// constraint Delta_E = Delta_B + delta_c is built into `ProbeDetunings`.
pub fn polarizability_quartet(
    params: &SystemParams,
    det: &ProbeDetunings,
    dark: &DarkStateSolution,
    broadening: &BroadeningSpec,
) -> Result<PolarizabilityQuartet> {
    quartet_at(params, &det.coherence_detunings(), dark, broadening.gammap)
}

/// Gauss-Hermite nodes and weights for integrals against exp(-t^2),
/// via the Golub-Welsch eigenvalue method.
pub fn gauss_hermite(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(Error::BadNodeCount(n));
    }
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let beta = (k as f64 / 2.0).sqrt();
        jacobi[(k - 1, k)] = beta;
        jacobi[(k, k - 1)] = beta;
    }
    let eig = nalgebra::SymmetricEigen::new(jacobi);
    let sqrt_pi = std::f64::consts::PI.sqrt();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], sqrt_pi * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(pairs.into_iter().unzip())
}

/// Gaussian (Doppler) average of a quartet-valued response.
///
/// A single shared shift x is applied to Delta_E, Delta_B and delta_c
/// jointly, so the two-photon combination protecting the EIT resonance
/// stays unbroadened while nu31 moves twice as fast. The shift is
/// integrated against exp(-x^2/sigma^2)/(sigma sqrt(pi)) by Gauss-Hermite
/// quadrature.
pub fn apply_doppler<F>(
    quartet_fn: F,
    spec: &BroadeningSpec,
    det: &ProbeDetunings,
) -> Result<PolarizabilityQuartet>
where
    F: Fn(&CoherenceDetunings) -> Result<PolarizabilityQuartet>,
{
    let nu0 = det.coherence_detunings();
    if spec.doppler_sigma == 0.0 {
        return quartet_fn(&nu0);
    }
    if spec.doppler_nodes == 0 || spec.doppler_nodes % 2 == 0 {
        return Err(Error::BadNodeCount(spec.doppler_nodes));
    }
    let (nodes, weights) = gauss_hermite(spec.doppler_nodes)?;
    let inv_sqrt_pi = 1.0 / std::f64::consts::PI.sqrt();
    let mut acc = [Complex64::new(0.0, 0.0); 4];
    for (t, w) in nodes.iter().zip(&weights) {
        let q = quartet_fn(&nu0.doppler_shifted(spec.doppler_sigma * t))?;
        for (a, c) in acc.iter_mut().zip(q.components()) {
            *a += w * inv_sqrt_pi * c;
        }
    }
    Ok(PolarizabilityQuartet { a_ee: acc[0], a_eb: acc[1], a_be: acc[2], a_bb: acc[3] })
}

/// Default fraction of the peak |Im| allowed at the grid edges.
///
/// The aEE imaginary tail falls off only as (gamma34+gamma_p)/Delta^2 and
/// sits at ~3e-3 of its peak on the default +-200 gamma_p grid; the
/// truncation it causes is well inside the 1e-2 residual budget.
pub const KK_EDGE_FRACTION: f64 = 1e-2;

/// Kramers-Kronig residual of a sampled complex response.
///
/// The spectrum must be sampled on a uniform grid in the sweep variable
/// Delta (photon energy increasing with index). The real asymptote (mean
/// of the two edge values) is subtracted, the real part is reconstructed
/// from the imaginary part by the discrete odd-kernel principal-value sum
/// Re[k] = (2/pi) sum_{j-k odd} Im[j]/(j-k), and the residual is the
/// maximum mismatch over the central half of the grid normalized by the
/// peak magnitude.
pub fn kramers_kronig_residual(spectrum: &[Complex64]) -> Result<f64> {
    kramers_kronig_residual_with_edge(spectrum, KK_EDGE_FRACTION)
}

/// Same as [`kramers_kronig_residual`] with an explicit edge criterion.
pub fn kramers_kronig_residual_with_edge(
    spectrum: &[Complex64],
    edge_fraction: f64,
) -> Result<f64> {
    let n = spectrum.len();
    if n < 16 {
        return Err(Error::KkGridTooShort(n));
    }
    let asymptote = (spectrum[0].re + spectrum[n - 1].re) / 2.0;
    let chi: Vec<Complex64> = spectrum.iter().map(|c| c - asymptote).collect();
    let peak = chi.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return Ok(0.0);
    }
    let im_peak = chi.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
    let im_edge = chi[0].im.abs().max(chi[n - 1].im.abs());
    if im_peak > 0.0 && im_edge > edge_fraction * im_peak {
        return Err(Error::KkGridTooNarrow { edge: im_edge / im_peak, limit: edge_fraction });
    }
    let mut worst: f64 = 0.0;
    for k in n / 4..3 * n / 4 {
        let mut sum = 0.0;
        // split at k so (j - k) runs over odd offsets with correct parity
        let start = if k % 2 == 0 { 1 } else { 0 };
        for j in (start..n).step_by(2) {
            sum += chi[j].im / (j as f64 - k as f64);
        }
        let re_kk = 2.0 / std::f64::consts::PI * sum;
        worst = worst.max((chi[k].re - re_kk).abs());
    }
    Ok(worst / peak)
}

/// Location of the cross-coupling maxima as a function of |Omega_c|.
///
/// For each trial |Omega_c| the peak of |aEB| and |aBE| over a detuning
/// window (+-2|Omega_c|) is recorded; returns the |Omega_c| values
/// maximizing each. The two optima differ because the aEB denominator is
/// built from (gamma42, gamma34+gamma_p) and the aBE one from
/// (gamma21+gamma_p, gamma31+2gamma_p).
pub fn omegac_optimum_scan(
    params: &SystemParams,
    dark: &DarkStateSolution,
    gammap: f64,
    omegac_abs_grid: &[f64],
) -> Result<(f64, f64)> {
    let mut best_eb = (f64::NEG_INFINITY, f64::NAN);
    let mut best_be = (f64::NEG_INFINITY, f64::NAN);
    for &omc in omegac_abs_grid {
        let mut trial = params.clone();
        trial.rabic_abs = omc;
        let mut peak_eb: f64 = 0.0;
        let mut peak_be: f64 = 0.0;
        let half_window = 2.0 * omc.max(gammap);
        let m = 201;
        for k in 0..m {
            let delta = -half_window + 2.0 * half_window * k as f64 / (m - 1) as f64;
            let det = ProbeDetunings::from_sweep(delta, 0.0);
            let q = polarizability_quartet(
                &trial,
                &det,
                dark,
                &BroadeningSpec { gammap, doppler_sigma: 0.0, doppler_nodes: 1 },
            )?;
            peak_eb = peak_eb.max(q.a_eb.norm());
            peak_be = peak_be.max(q.a_be.norm());
        }
        if peak_eb > best_eb.0 {
            best_eb = (peak_eb, omc);
        }
        if peak_be > best_be.0 {
            best_be = (peak_be, omc);
        }
    }
    Ok((best_eb.1, best_be.1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{dark_state_populations, default_paper_params};
    use approx::assert_relative_eq;

    fn setup() -> (SystemParams, DarkStateSolution) {
        let p = default_paper_params();
        let d = dark_state_populations(p.rabi1, p.rabi2).unwrap();
        (p, d)
    }

    #[test]
    fn cross_terms_vanish_without_coupling() {
        let (mut p, d) = setup();
        p.rabic_abs = 0.0;
        let det = ProbeDetunings::from_sweep(0.5 * p.gamma2, 0.0);
        let b = BroadeningSpec::homogeneous(1e3 * p.gamma2).unwrap();
        let q = polarizability_quartet(&p, &det, &d, &b).unwrap();
        assert_eq!(q.a_eb, Complex64::new(0.0, 0.0));
        assert_eq!(q.a_be, Complex64::new(0.0, 0.0));
        // aEE collapses to the bare Lorentzian i d^2 rho44 / (2 hbar (g34 + gp + i dE))
        let g34 = p.gamma_ij(3, 4) + b.gammap;
        let expected = Complex64::i() * p.d34 * p.d34 * d.rho44
            / (2.0 * HBAR * Complex64::new(g34, det.delta_e()));
        assert_relative_eq!(q.a_ee.re, expected.re, max_relative = 1e-12);
        assert_relative_eq!(q.a_ee.im, expected.im, max_relative = 1e-12);
    }

    #[test]
    fn perfect_eit_on_resonance_without_ground_decoherence() {
        // gamma42 = 0 requires gamma2 = 0; the numerator of aEE is
        // proportional to gamma42 on exact resonance.
        let (mut p, d) = setup();
        p.gamma2 = 0.0;
        let det = ProbeDetunings::from_sweep(0.0, 0.0);
        let q =
            polarizability_quartet(&p, &det, &d, &BroadeningSpec::none()).unwrap();
        assert_eq!(q.a_ee, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn resonant_cross_couplings_imaginary_with_opposite_signs() {
        let (p, d) = setup();
        let det = ProbeDetunings::from_sweep(0.0, 0.0);
        let b = BroadeningSpec::homogeneous(1e3 * p.gamma2).unwrap();
        let q = polarizability_quartet(&p, &det, &d, &b).unwrap();
        // phi = pi/2 on resonance: both cross terms purely imaginary,
        // opposite signs.
        assert!(q.a_eb.re.abs() < 1e-12 * q.a_eb.norm());
        assert!(q.a_be.re.abs() < 1e-12 * q.a_be.norm());
        assert!(q.a_eb.im * q.a_be.im < 0.0);
    }

    #[test]
    fn phase_covariance() {
        let (p, d) = setup();
        let det = ProbeDetunings::from_sweep(123.0 * p.gamma2, 0.0);
        let b = BroadeningSpec::homogeneous(1e3 * p.gamma2).unwrap();
        let q0 = polarizability_quartet(&p, &det, &d, &b).unwrap();
        let shift = 0.8;
        let mut p2 = p.clone();
        p2.rabic_phase += shift;
        let q1 = polarizability_quartet(&p2, &det, &d, &b).unwrap();
        let rot = Complex64::from_polar(1.0, shift);
        assert_relative_eq!((q1.a_eb / q0.a_eb - rot).norm(), 0.0, epsilon = 1e-12);
        assert_relative_eq!((q1.a_be / q0.a_be - rot.conj()).norm(), 0.0, epsilon = 1e-12);
        assert_eq!(q0.a_ee, q1.a_ee);
        assert_eq!(q0.a_bb, q1.a_bb);
    }

    #[test]
    fn on_resonance_absorption_scales_with_gamma42() {
        // Im[aEE](0) is proportional to gamma42 = gamma2/2 for fixed |Omega_c|.
        let (p, d) = setup();
        let det = ProbeDetunings::from_sweep(0.0, 0.0);
        let b = BroadeningSpec::none();
        let q1 = polarizability_quartet(&p, &det, &d, &b).unwrap();
        let mut p2 = p.clone();
        p2.gamma2 *= 0.5;
        // keep the mu21 dipole fixed so only gamma42 changes the response
        p2.mu21 = p.mu21;
        let q2 = polarizability_quartet(&p2, &det, &d, &b).unwrap();
        let ratio = q2.a_ee.im / q1.a_ee.im;
        assert_relative_eq!(ratio, 0.5, max_relative = 1e-3);
    }

    #[test]
    fn eit_floor_depends_on_gammap_only_via_g34_factor() {
        // (g42 (g34 + gp) + |Oc|^2/4) * aEE(0) is gp-independent.
        let (p, d) = setup();
        let det = ProbeDetunings::from_sweep(0.0, 0.0);
        let k = |gp: f64| {
            let b = BroadeningSpec::homogeneous(gp).unwrap();
            let q = polarizability_quartet(&p, &det, &d, &b).unwrap();
            let g42 = p.gamma_ij(4, 2);
            let g34 = p.gamma_ij(3, 4) + gp;
            q.a_ee * Complex64::new(g42 * g34 + p.rabic_abs.powi(2) / 4.0, 0.0)
        };
        let k1 = k(0.0);
        let k2 = k(2e3 * p.gamma2);
        assert_relative_eq!((k1 - k2).norm() / k1.norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn components_decay_at_large_detuning() {
        let (p, d) = setup();
        let b = BroadeningSpec::homogeneous(1e3 * p.gamma2).unwrap();
        let near = polarizability_quartet(
            &p,
            &ProbeDetunings::from_sweep(0.01 * p.rabic_abs, 0.0),
            &d,
            &b,
        )
        .unwrap();
        let far = polarizability_quartet(
            &p,
            &ProbeDetunings::from_sweep(1e3 * p.rabic_abs, 0.0),
            &d,
            &b,
        )
        .unwrap();
        for (f, n) in far.components().iter().zip(near.components()) {
            assert!(f.norm() < 1e-2 * n.norm());
        }
    }

    #[test]
    fn gauss_hermite_integrates_moments() {
        let (t, w) = gauss_hermite(41).unwrap();
        let sqrt_pi = std::f64::consts::PI.sqrt();
        let m0: f64 = w.iter().sum();
        let m2: f64 = t.iter().zip(&w).map(|(x, w)| w * x * x).sum();
        let m4: f64 = t.iter().zip(&w).map(|(x, w)| w * x.powi(4)).sum();
        assert_relative_eq!(m0, sqrt_pi, max_relative = 1e-12);
        assert_relative_eq!(m2, sqrt_pi / 2.0, max_relative = 1e-12);
        assert_relative_eq!(m4, 3.0 * sqrt_pi / 4.0, max_relative = 1e-12);
    }

    #[test]
    fn doppler_zero_width_is_identity() {
        let (p, d) = setup();
        let det = ProbeDetunings::from_sweep(37.0 * p.gamma2, 0.0);
        let spec = BroadeningSpec::new(1e3 * p.gamma2, 0.0, 41).unwrap();
        let direct = polarizability_quartet(&p, &det, &d, &spec).unwrap();
        let averaged =
            apply_doppler(|nu| quartet_at(&p, nu, &d, spec.gammap), &spec, &det).unwrap();
        for (a, b) in averaged.components().iter().zip(direct.components()) {
            assert_relative_eq!((a - b).norm() / b.norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn doppler_node_doubling_converged() {
        let (p, d) = setup();
        let det = ProbeDetunings::from_sweep(0.0, 0.0);
        let run = |nodes: usize| {
            let spec = BroadeningSpec::new(1e3 * p.gamma2, 5e3 * p.gamma2, nodes).unwrap();
            apply_doppler(|nu| quartet_at(&p, nu, &d, spec.gammap), &spec, &det).unwrap()
        };
        let a = run(41);
        let b = run(83);
        for (x, y) in a.components().iter().zip(b.components()) {
            assert!((x - y).norm() / y.norm() < 1e-6);
        }
    }

    #[test]
    fn doppler_broadens_the_magnetic_line() {
        // Omega_c = 0 leaves aBB a bare Lorentzian; the Gaussian average
        // must lower the peak and widen the line.
        let (mut p, d) = setup();
        p.rabic_abs = 0.0;
        let gp = 1e3 * p.gamma2;
        let sigma = 2e3 * p.gamma2;
        let spec = BroadeningSpec::new(gp, sigma, 41).unwrap();
        let at = |delta: f64, s: &BroadeningSpec| {
            let det = ProbeDetunings::from_sweep(delta, 0.0);
            apply_doppler(|nu| quartet_at(&p, nu, &d, s.gammap), s, &det).unwrap()
        };
        let plain = BroadeningSpec::new(gp, 0.0, 41).unwrap();
        let peak0 = at(0.0, &plain).a_bb.im;
        let peak = at(0.0, &spec).a_bb.im;
        assert!(peak < peak0);
        // half-width comparison: find where Im falls to half peak
        let hw = |s: &BroadeningSpec, pk: f64| {
            let mut delta = 0.0;
            while at(delta, s).a_bb.im > pk / 2.0 {
                delta += 50.0 * p.gamma2;
            }
            delta
        };
        assert!(hw(&spec, peak) > hw(&plain, peak0));
    }

    #[test]
    fn kk_lorentzian_within_truncation() {
        // chi(Delta) = i/(gamma - i Delta) in the increasing-photon-energy
        // variable; +-100 gamma window.
        let n = 4096;
        let gamma = 1.0;
        let spectrum: Vec<Complex64> = (0..n)
            .map(|k| {
                let delta = -100.0 + 200.0 * k as f64 / (n - 1) as f64;
                Complex64::i() / Complex64::new(gamma, -delta)
            })
            .collect();
        let r = kramers_kronig_residual_with_edge(&spectrum, 1e-3).unwrap();
        assert!(r <= 1e-2, "residual {r}");
    }

    #[test]
    fn kk_constant_after_asymptote_subtraction() {
        let spectrum = vec![Complex64::new(3.7, 0.0); 1024];
        let r = kramers_kronig_residual(&spectrum).unwrap();
        assert!(r <= 1e-12);
    }

    #[test]
    fn kk_rejects_narrow_grid() {
        let n = 512;
        let spectrum: Vec<Complex64> = (0..n)
            .map(|k| {
                let delta = -3.0 + 6.0 * k as f64 / (n - 1) as f64;
                Complex64::i() / Complex64::new(1.0, -delta)
            })
            .collect();
        assert!(matches!(
            kramers_kronig_residual(&spectrum),
            Err(Error::KkGridTooNarrow { .. })
        ));
    }

    #[test]
    fn omegac_optima_land_on_the_two_denominator_scales() {
        let (p, d) = setup();
        let gp = 1e3 * p.gamma2;
        let grid: Vec<f64> = (0..240)
            .map(|k| p.gamma2 * 10.0_f64.powf(1.0 + 3.5 * k as f64 / 239.0))
            .collect();
        let (opt_eb, opt_be) = omegac_optimum_scan(&p, &d, gp, &grid).unwrap();
        // aEB: sqrt(4 g42 (g34+gp)) ~ 144 gamma2; aBE: sqrt(4 (g21+gp)(g31+2gp)) ~ 6750 gamma2
        let pred_eb = (4.0 * p.gamma_ij(4, 2) * (p.gamma_ij(3, 4) + gp)).sqrt();
        let pred_be = (4.0 * (p.gamma_ij(2, 1) + gp) * (p.gamma_ij(3, 1) + 2.0 * gp)).sqrt();
        assert!((opt_eb / pred_eb).ln().abs() < 0.2, "aEB optimum {opt_eb}");
        assert!((opt_be / pred_be).ln().abs() < 0.2, "aBE optimum {opt_be}");
    }
}
