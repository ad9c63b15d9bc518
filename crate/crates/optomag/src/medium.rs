//! Macroscopic response: local-field corrections, refractive index, figure
//! of merit, Fresnel reflection, inverse impedance and the superlens
//! tolerance.
//!
//! The microscopic polarizabilities are promoted to macroscopic epsilon,
//! mu, xi_EH, xi_HE by Clausius-Mossotti-type corrections extended to the
//! coupled electric/magnetic response; all four share one denominator
//! L = 1 - (4pi/3) rho (aEE + aBB) - (4pi/3)^2 rho^2 (aEB aBE - aEE aBB).

use crate::error::{Error, Result};
use crate::response::PolarizabilityQuartet;
use num_complex::Complex64;

/// Magnitude below which the local-field denominator counts as singular.
pub const LOCAL_FIELD_EPS: f64 = 1e-12;

/// Circular polarization handedness of the probe mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Handedness {
    Plus,
    Minus,
}

/// Which square-root branch the index evaluation ended up on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchFlag {
    /// Principal root already satisfied Im[n] >= 0.
    Principal,
    /// Principal root gave Im[n] < 0; the other root was taken.
    Flipped,
    /// Both roots gave Im[n] < 0; kept the larger Im[n].
    GainWarning,
}

impl BranchFlag {
    pub fn as_str(&self) -> &'static str {
        match self {
            BranchFlag::Principal => "principal",
            BranchFlag::Flipped => "flipped",
            BranchFlag::GainWarning => "gain-warning",
        }
    }
}

/// Macroscopic constitutive parameters (dimensionless, Gaussian units).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MediumResponse {
    pub eps: Complex64,
    pub mu: Complex64,
    pub xi_eh: Complex64,
    pub xi_he: Complex64,
    /// Number density of scatterers (cm^-3).
    pub density: f64,
}

impl MediumResponse {
    pub fn vacuum() -> Self {
        MediumResponse {
            eps: Complex64::new(1.0, 0.0),
            mu: Complex64::new(1.0, 0.0),
            xi_eh: Complex64::new(0.0, 0.0),
            xi_he: Complex64::new(0.0, 0.0),
            density: 0.0,
        }
    }

    /// Constitutive parameters of the opposite circular mode under the
    /// nine-level sign relations: eps and mu unchanged, both cross
    /// couplings flip sign.
    pub fn opposite_handedness(&self) -> Self {
        MediumResponse { xi_eh: -self.xi_eh, xi_he: -self.xi_he, ..*self }
    }
}

/// Refractive index with its figure of merit and branch bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefractiveResult {
    pub n: Complex64,
    /// -Re[n]/Im[n]; +inf when Im[n] = 0.
    pub fom: f64,
    pub branch_flag: BranchFlag,
}

/// Local-field-corrected constitutive parameters for scatterer density
/// `density` (cm^-3).
pub fn local_field_correct(
    quartet: &PolarizabilityQuartet,
    density: f64,
) -> Result<MediumResponse> {
    let f = Complex64::new(4.0 * std::f64::consts::PI / 3.0 * density, 0.0);
    let four_pi_rho = Complex64::new(4.0 * std::f64::consts::PI * density, 0.0);
    let det_term = quartet.a_eb * quartet.a_be - quartet.a_ee * quartet.a_bb;
    let l_loc = Complex64::new(1.0, 0.0)
        - f * quartet.a_ee
        - f * quartet.a_bb
        - f * f * det_term;
    if l_loc.norm() < LOCAL_FIELD_EPS {
        return Err(Error::LocalFieldSingularity(l_loc.norm()));
    }
    let scale = four_pi_rho / l_loc;
    Ok(MediumResponse {
        eps: 1.0 + scale * (quartet.a_ee + f * det_term),
        mu: 1.0 + scale * (quartet.a_bb + f * det_term),
        xi_eh: scale * quartet.a_eb,
        xi_he: scale * quartet.a_be,
        density,
    })
}

/// Passivity-selecting complex index: n = sqrt(eps mu - (xi_EH+xi_HE)^2/4)
/// +- (i/2)(xi_EH - xi_HE), with the sign of the additive term set by the
/// handedness. The square-root branch is chosen so Im[n] >= 0; if both
/// roots are amplifying the larger Im[n] wins and the result is flagged.
pub fn refractive_index(m: &MediumResponse, handedness: Handedness) -> RefractiveResult {
    let sum = m.xi_eh + m.xi_he;
    let diff = m.xi_eh - m.xi_he;
    let root = (m.eps * m.mu - sum * sum / 4.0).sqrt();
    let sign = match handedness {
        Handedness::Plus => 1.0,
        Handedness::Minus => -1.0,
    };
    let additive = sign * Complex64::i() / 2.0 * diff;
    branch_select(root, additive)
}

fn branch_select(root: Complex64, additive: Complex64) -> RefractiveResult {
    let n_plus = root + additive;
    let n_minus = -root + additive;
    let (n, branch_flag) = if n_plus.im >= 0.0 {
        (n_plus, BranchFlag::Principal)
    } else if n_minus.im >= 0.0 {
        (n_minus, BranchFlag::Flipped)
    } else if n_plus.im >= n_minus.im {
        (n_plus, BranchFlag::GainWarning)
    } else {
        (n_minus, BranchFlag::GainWarning)
    };
    RefractiveResult { n, fom: figure_of_merit(n), branch_flag }
}

/// Figure of merit -Re[n]/Im[n]; returns +inf (the undefined-FoM sentinel)
/// when Im[n] = 0.
pub fn figure_of_merit(n: Complex64) -> f64 {
    if n.im == 0.0 {
        f64::INFINITY
    } else {
        -n.re / n.im
    }
}

/// Normal-incidence amplitude reflection coefficient E_r/E_i at the
/// boundary between a non-chiral medium 1 and the cross-coupled medium 2:
/// r = (1 - q)/(1 + q) with q = sqrt(mu1/eps1) (n2 + i xi_HE)/mu2.
pub fn fresnel_reflection(
    eps1: Complex64,
    mu1: Complex64,
    m2: &MediumResponse,
    handedness: Handedness,
) -> Result<Complex64> {
    if m2.mu.norm() < 1e-300 {
        return Err(Error::DegenerateMedium(m2.mu.norm()));
    }
    let m2h = match handedness {
        Handedness::Plus => *m2,
        Handedness::Minus => m2.opposite_handedness(),
    };
    let n2 = refractive_index(&m2h, Handedness::Plus).n;
    let q = (mu1 / eps1).sqrt() * (n2 + Complex64::i() * m2h.xi_he) / m2h.mu;
    Ok((1.0 - q) / (1.0 + q))
}

/// Inverse impedance of the cross-coupled medium,
/// Z^-1 = sqrt(eps/mu) [ sqrt(1 - s^2) + i s ] with
/// s = (xi_EH + xi_HE)/(2 sqrt(eps mu)); branches are chosen so that
/// Re[Z^-1] >= 0 (Im >= 0 breaking ties on the imaginary axis).
pub fn inverse_impedance(m: &MediumResponse) -> Complex64 {
    let root_em = (m.eps * m.mu).sqrt();
    let s = (m.xi_eh + m.xi_he) / (2.0 * root_em);
    let z = (m.eps / m.mu).sqrt() * ((1.0 - s * s).sqrt() + Complex64::i() * s);
    if z.re > 0.0 || (z.re == 0.0 && z.im >= 0.0) {
        z
    } else {
        -z
    }
}

/// Index accuracy |Delta n| = exp(-2 pi d / Delta x) needed for a flat
/// lens of thickness d to resolve Delta x.
pub fn superlens_tolerance(thickness: f64, resolution: f64) -> Result<f64> {
    if resolution <= 0.0 {
        return Err(Error::InvalidResolution(resolution));
    }
    if thickness < 0.0 {
        return Err(Error::InvalidResolution(thickness));
    }
    Ok((-2.0 * std::f64::consts::PI * thickness / resolution).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_relative_eq, assert_ulps_eq};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn quartet(
        a_ee: Complex64,
        a_eb: Complex64,
        a_be: Complex64,
        a_bb: Complex64,
    ) -> PolarizabilityQuartet {
        PolarizabilityQuartet { a_ee, a_eb, a_be, a_bb }
    }

    #[test]
    fn vacuum_limit() {
        let q = quartet(c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        let m = local_field_correct(&q, 1e16).unwrap();
        assert_eq!(m.eps, c(1.0, 0.0));
        assert_eq!(m.mu, c(1.0, 0.0));
        assert_eq!(m.xi_eh, c(0.0, 0.0));
        assert_eq!(m.xi_he, c(0.0, 0.0));
    }

    #[test]
    fn clausius_mossotti_factorization() {
        // without cross terms eps reduces to 1 + 4pi rho aEE / (1 - 4pi/3 rho aEE)
        let a_ee = c(2.1e-17, 3.0e-18);
        let a_bb = c(-4.0e-19, 1.0e-19);
        let q = quartet(a_ee, c(0.0, 0.0), c(0.0, 0.0), a_bb);
        let rho = 3.0e16;
        let m = local_field_correct(&q, rho).unwrap();
        let f = 4.0 * std::f64::consts::PI / 3.0 * rho;
        let cm_eps = 1.0 + 4.0 * std::f64::consts::PI * rho * a_ee / (1.0 - f * a_ee);
        let cm_mu = 1.0 + 4.0 * std::f64::consts::PI * rho * a_bb / (1.0 - f * a_bb);
        assert_relative_eq!((m.eps - cm_eps).norm(), 0.0, epsilon = 1e-12);
        assert_relative_eq!((m.mu - cm_mu).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn dilute_expansion_first_order() {
        let a_ee = c(1.0e-17, 2.0e-18);
        let a_eb = c(5.0e-19, -1.0e-19);
        let q = quartet(a_ee, a_eb, c(-3.0e-19, 2.0e-19), c(1.0e-20, 1.0e-21));
        let rho = 1.0e10; // deep dilute regime
        let m = local_field_correct(&q, rho).unwrap();
        let lin_eps = 4.0 * std::f64::consts::PI * rho * a_ee;
        let lin_xi = 4.0 * std::f64::consts::PI * rho * a_eb;
        assert_relative_eq!((m.eps - 1.0 - lin_eps).norm() / lin_eps.norm(), 0.0, epsilon = 1e-5);
        assert_relative_eq!((m.xi_eh - lin_xi).norm() / lin_xi.norm(), 0.0, epsilon = 1e-5);
    }

    #[test]
    fn xi_density_slope_at_zero() {
        // d|xi_EH|/d rho at rho = 0 equals 4 pi |aEB|
        let a_eb = c(5.0e-19, -1.0e-19);
        let q = quartet(c(1.0e-17, 2.0e-18), a_eb, c(-3e-19, 2e-19), c(1e-20, 0.0));
        let h = 1.0;
        let m = local_field_correct(&q, h).unwrap();
        let slope = m.xi_eh.norm() / h;
        assert_relative_eq!(
            slope,
            4.0 * std::f64::consts::PI * a_eb.norm(),
            max_relative = 1e-9
        );
    }

    #[test]
    fn local_field_singularity_detected() {
        // choose aEE so that 1 - 4pi/3 rho aEE = 0 with everything else off
        let rho = 1.0e16;
        let a_ee = c(3.0 / (4.0 * std::f64::consts::PI * rho), 0.0);
        let q = quartet(a_ee, c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        assert!(matches!(
            local_field_correct(&q, rho),
            Err(Error::LocalFieldSingularity(_))
        ));
    }

    #[test]
    fn index_reduces_to_sqrt_eps_mu() {
        let m = MediumResponse {
            eps: c(2.25, 0.0),
            mu: c(1.0, 0.0),
            xi_eh: c(0.0, 0.0),
            xi_he: c(0.0, 0.0),
            density: 0.0,
        };
        let r = refractive_index(&m, Handedness::Plus);
        assert_relative_eq!(r.n.re, 1.5, max_relative = 1e-15);
        assert_eq!(r.n.im, 0.0);
        assert_eq!(r.branch_flag, BranchFlag::Principal);
    }

    #[test]
    fn antisymmetric_cross_coupling_shifts_index() {
        // xi_EH = -xi_HE = i xi gives n = sqrt(eps mu) - xi
        let xi = 0.7;
        let m = MediumResponse {
            eps: c(1.2, 0.1),
            mu: c(1.1, 0.05),
            xi_eh: c(0.0, xi),
            xi_he: c(0.0, -xi),
            density: 0.0,
        };
        let r = refractive_index(&m, Handedness::Plus);
        let expected = (m.eps * m.mu).sqrt() - xi;
        assert_relative_eq!((r.n - expected).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn index_direct_substitution_example() {
        let m = MediumResponse {
            eps: c(1.0, 0.0),
            mu: c(1.0, 0.0),
            xi_eh: c(0.0, 0.1),
            xi_he: c(0.0, 0.1),
            density: 0.0,
        };
        let r = refractive_index(&m, Handedness::Plus);
        assert_relative_eq!(r.n.re, 1.01f64.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn figure_of_merit_examples() {
        assert_relative_eq!(figure_of_merit(c(-1.0, 0.01)), 100.0, max_relative = 1e-12);
        let fom = figure_of_merit(c(-1.0003, 0.009));
        assert!((fom - 111.0).abs() < 1.0, "fom = {fom}");
        assert_relative_eq!(figure_of_merit(c(2.0, 0.5)), -4.0, max_relative = 1e-12);
        assert!(figure_of_merit(c(1.0, 0.0)).is_infinite());
    }

    #[test]
    fn fresnel_no_interface() {
        let m = MediumResponse::vacuum();
        let r = fresnel_reflection(c(1.0, 0.0), c(1.0, 0.0), &m, Handedness::Plus).unwrap();
        assert_relative_eq!(r.norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn fresnel_textbook_dielectric() {
        let m = MediumResponse {
            eps: c(4.0, 0.0),
            mu: c(1.0, 0.0),
            xi_eh: c(0.0, 0.0),
            xi_he: c(0.0, 0.0),
            density: 0.0,
        };
        let r = fresnel_reflection(c(1.0, 0.0), c(1.0, 0.0), &m, Handedness::Plus).unwrap();
        assert_relative_eq!(r.re, -1.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(r.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn matched_medium_reflects_nothing() {
        // eps2 = mu2 with antisymmetric cross coupling satisfies Z^-1 = 1
        let m = MediumResponse {
            eps: c(1.7, 0.3),
            mu: c(1.7, 0.3),
            xi_eh: c(0.2, 0.4),
            xi_he: c(-0.2, -0.4),
            density: 0.0,
        };
        let z = inverse_impedance(&m);
        assert_relative_eq!((z - 1.0).norm(), 0.0, epsilon = 1e-12);
        let r = fresnel_reflection(c(1.0, 0.0), c(1.0, 0.0), &m, Handedness::Plus).unwrap();
        assert!(r.norm() <= 1e-10, "|r| = {}", r.norm());
    }

    #[test]
    fn impedance_vacuum_and_antisymmetric_cases() {
        let v = MediumResponse::vacuum();
        assert_eq!(inverse_impedance(&v), c(1.0, 0.0));
        let m = MediumResponse {
            eps: c(2.0, 0.1),
            mu: c(1.3, 0.2),
            xi_eh: c(0.3, -0.2),
            xi_he: c(-0.3, 0.2),
            density: 0.0,
        };
        let z = inverse_impedance(&m);
        let expected = (m.eps / m.mu).sqrt();
        assert_relative_eq!((z - expected).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn impedance_branch_has_nonnegative_real_part() {
        let m = MediumResponse {
            eps: c(-1.2, 0.4),
            mu: c(0.8, 0.1),
            xi_eh: c(0.1, 1.1),
            xi_he: c(0.2, -0.9),
            density: 0.0,
        };
        assert!(inverse_impedance(&m).re >= 0.0);
    }

    #[test]
    fn superlens_tolerance_values() {
        assert_ulps_eq!(superlens_tolerance(0.0, 1.0).unwrap(), 1.0);
        assert_relative_eq!(
            superlens_tolerance(1.0, 1.0).unwrap(),
            (-2.0 * std::f64::consts::PI).exp(),
            max_relative = 1e-15
        );
        assert_relative_eq!(
            superlens_tolerance(10.0, 1.0).unwrap(),
            (-20.0 * std::f64::consts::PI).exp(),
            max_relative = 1e-12
        );
        assert!(superlens_tolerance(1.0, 0.0).is_err());
    }
}
