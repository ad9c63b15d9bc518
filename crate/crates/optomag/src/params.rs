//! Atomic-system parameters, detuning conventions and the dark-state
//! solution of the Lambda subsystem.
//!
//! The five-level scheme couples an electric dipole transition |4>-|3> and a
//! magnetic dipole transition |1>-|2> through a strong field Omega_c on
//! |2>-|3>, with the effective ground state supplied by the dark state of
//! the Lambda subsystem {|1>,|4>,|5>} driven by Omega_1 and Omega_2.

use crate::constants::{ALPHA_INV, GAMMA2_DEFAULT, HBAR, LAMBDA_DEFAULT, SPEED_OF_LIGHT};
use crate::error::{Error, Result};
use num_complex::Complex64;

/// Relative tolerance (times omega_1) for the closed-loop resonance check.
pub const RESONANCE_REL_TOL: f64 = 1e-9;

/// All atomic and drive constants, Gaussian units.
///
/// Population decay rates `gamma1..gamma5` are in rad/s, dipole moments in
/// statC cm (`d34`) and erg/G (`mu21`), drive angular frequencies and Rabi
/// frequencies in rad/s, the probe wavelength in cm. The complex coupling
/// Rabi frequency is stored as magnitude and phase.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    pub gamma4: f64,
    pub gamma5: f64,
    pub d34: f64,
    pub mu21: f64,
    /// Drive laser angular frequencies; only the combination
    /// omega_c - (omega_1 - omega_2) is physically constrained.
    pub omega1: f64,
    pub omega2: f64,
    pub omegac: f64,
    /// Lambda-subsystem Rabi frequencies (real).
    pub rabi1: f64,
    pub rabi2: f64,
    /// Coupling Rabi frequency magnitude and phase.
    pub rabic_abs: f64,
    pub rabic_phase: f64,
    pub lambda_probe: f64,
}

impl SystemParams {
    /// Coupling Rabi frequency as a complex number.
    pub fn rabic(&self) -> Complex64 {
        Complex64::from_polar(self.rabic_abs, self.rabic_phase)
    }

    /// Off-diagonal decay rate gamma_ij = (gamma_i + gamma_j)/2 for
    /// levels i, j in 1..=5.
    pub fn gamma_ij(&self, i: usize, j: usize) -> f64 {
        (self.gamma(i) + self.gamma(j)) / 2.0
    }

    /// Population decay rate of level i in 1..=5.
    pub fn gamma(&self, i: usize) -> f64 {
        match i {
            1 => self.gamma1,
            2 => self.gamma2,
            3 => self.gamma3,
            4 => self.gamma4,
            5 => self.gamma5,
            _ => panic!("level index {i} out of range 1..=5"),
        }
    }

    /// Probe angular frequency 2 pi c / lambda.
    pub fn omega_probe(&self) -> f64 {
        2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / self.lambda_probe
    }

    fn validate(&self) -> Result<()> {
        for g in [self.gamma1, self.gamma2, self.gamma3, self.gamma4, self.gamma5] {
            if g < 0.0 {
                return Err(Error::NegativeRate(g));
            }
        }
        if self.rabic_abs < 0.0 {
            return Err(Error::NegativeRate(self.rabic_abs));
        }
        if self.lambda_probe <= 0.0 {
            return Err(Error::InvalidFrequency(self.lambda_probe));
        }
        Ok(())
    }
}

/// Electric/magnetic dipole moment from the radiative decay rate:
/// d = sqrt(3 gamma hbar c^3 / (4 omega^3)).
///
/// Returns statC cm for an electric transition, erg/G for a magnetic one.
pub fn wigner_weisskopf_dipole(gamma: f64, omega: f64) -> Result<f64> {
    if omega <= 0.0 {
        return Err(Error::InvalidFrequency(omega));
    }
    if gamma < 0.0 {
        return Err(Error::NegativeRate(gamma));
    }
    Ok((3.0 * gamma * HBAR * SPEED_OF_LIGHT.powi(3) / (4.0 * omega.powi(3))).sqrt())
}

/// The reference parameter set: gamma2 = 2 pi kHz, gamma3 = gamma5 =
/// 137^2 gamma2, gamma1 = gamma4 = 0, Omega_1 = Omega_2 = 10^2 gamma2,
/// Omega_c = 10^4 gamma2 e^{i pi/2}, lambda = 600 nm, dipoles from the
/// Wigner-Weisskopf relation at the probe frequency.
pub fn default_paper_params() -> SystemParams {
    let gamma2 = GAMMA2_DEFAULT;
    let gamma3 = ALPHA_INV * ALPHA_INV * gamma2;
    let omega_p = 2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / LAMBDA_DEFAULT;
    let d34 = wigner_weisskopf_dipole(gamma3, omega_p).expect("positive probe frequency");
    let mu21 = wigner_weisskopf_dipole(gamma2, omega_p).expect("positive probe frequency");
    // Levels |2> and |4> are taken degenerate, so the coupling transition
    // |2>-|3> sits at the probe frequency; omega_1 is an arbitrary optical
    // frequency and omega_2 follows from the closed-loop condition. Only
    // omega_c - (omega_1 - omega_2) enters any observable.
    let omegac = omega_p;
    let omega1 = 1.5 * omega_p;
    let omega2 = omega1 - omegac;
    SystemParams {
        gamma1: 0.0,
        gamma2,
        gamma3,
        gamma4: 0.0,
        gamma5: gamma3,
        d34,
        mu21,
        omega1,
        omega2,
        omegac,
        rabi1: 1.0e2 * gamma2,
        rabi2: 1.0e2 * gamma2,
        rabic_abs: 1.0e4 * gamma2,
        rabic_phase: std::f64::consts::FRAC_PI_2,
        lambda_probe: LAMBDA_DEFAULT,
    }
}

/// Builder that keeps the default structure but overrides the ratios the
/// configuration file exposes. `gamma2` in rad/s; ratios dimensionless.
#[allow(clippy::too_many_arguments)]
pub fn params_from_ratios(
    gamma2: f64,
    gamma3_over_gamma2: f64,
    omega1_over_gamma2: f64,
    omegac_abs_over_gamma2: f64,
    omegac_phase: f64,
    lambda_cm: f64,
) -> Result<SystemParams> {
    if gamma2 < 0.0 {
        return Err(Error::NegativeRate(gamma2));
    }
    if lambda_cm <= 0.0 {
        return Err(Error::InvalidFrequency(lambda_cm));
    }
    let gamma3 = gamma3_over_gamma2 * gamma2;
    let omega_p = 2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / lambda_cm;
    let d34 = wigner_weisskopf_dipole(gamma3, omega_p)?;
    let mu21 = wigner_weisskopf_dipole(gamma2, omega_p)?;
    let omegac = omega_p;
    let omega1 = 1.5 * omega_p;
    let params = SystemParams {
        gamma1: 0.0,
        gamma2,
        gamma3,
        gamma4: 0.0,
        gamma5: gamma3,
        d34,
        mu21,
        omega1,
        omega2: omega1 - omegac,
        omegac,
        rabi1: omega1_over_gamma2 * gamma2,
        rabi2: omega1_over_gamma2 * gamma2,
        rabic_abs: omegac_abs_over_gamma2 * gamma2,
        rabic_phase: omegac_phase,
        lambda_probe: lambda_cm,
    };
    params.validate()?;
    Ok(params)
}

/// Verifies the closed-loop condition omega_c = omega_1 - omega_2 within
/// `RESONANCE_REL_TOL * omega_1`. The quartet formulas are only valid on
/// this resonance.
pub fn resonance_check(params: &SystemParams) -> Result<()> {
    let residual = params.omegac - (params.omega1 - params.omega2);
    let tolerance = RESONANCE_REL_TOL * params.omega1.abs();
    if residual.abs() <= tolerance {
        Ok(())
    } else {
        Err(Error::ResonanceViolated { residual, tolerance })
    }
}

/// Probe and coupling detunings.
///
/// `delta_e = omega_34 - omega_p`, `delta_b = omega_21 - omega_p`,
/// `delta_c = omega_32 - omega_c`. The consistency constraint
/// `delta_e = delta_b + delta_c` encodes the closed loop and is enforced by
/// construction. Spectra are plotted against `delta() = -delta_e` so photon
/// energy increases left to right.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeDetunings {
    delta_e: f64,
    delta_b: f64,
    delta_c: f64,
}

impl ProbeDetunings {
    /// From the sweep variable Delta = -Delta_E and the coupling detuning.
    pub fn from_sweep(delta: f64, delta_c: f64) -> Self {
        let delta_e = -delta;
        ProbeDetunings {
            delta_e,
            delta_b: delta_e - delta_c,
            delta_c,
        }
    }

    /// From Delta_E and delta_c; Delta_B follows from the constraint.
    pub fn from_delta_e(delta_e: f64, delta_c: f64) -> Self {
        ProbeDetunings {
            delta_e,
            delta_b: delta_e - delta_c,
            delta_c,
        }
    }

    pub fn delta_e(&self) -> f64 {
        self.delta_e
    }

    pub fn delta_b(&self) -> f64 {
        self.delta_b
    }

    pub fn delta_c(&self) -> f64 {
        self.delta_c
    }

    /// Sweep variable Delta = -Delta_E.
    pub fn delta(&self) -> f64 {
        -self.delta_e
    }

    /// The four detuning combinations entering the response denominators,
    /// indexed by coherence: nu_ij adds to gamma_ij as gamma_ij + i*nu_ij.
    pub fn coherence_detunings(&self) -> CoherenceDetunings {
        CoherenceDetunings {
            nu34: self.delta_e,
            nu42: self.delta_e - self.delta_c,
            nu21: self.delta_b,
            nu31: self.delta_b + self.delta_c,
        }
    }
}

/// Imaginary bracket arguments of the four response denominators.
///
/// Broadening mechanisms act on these combinations directly; a Doppler
/// shift x moves `nu34` and `nu21` by x and `nu31` by 2x while leaving the
/// two-photon combination `nu42` untouched.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceDetunings {
    pub nu34: f64,
    pub nu42: f64,
    pub nu21: f64,
    pub nu31: f64,
}

impl CoherenceDetunings {
    /// Common shift of Delta_E, Delta_B and delta_c by x: the closed-loop
    /// combination nu42 is invariant, nu31 picks up the shift twice.
    pub fn doppler_shifted(&self, x: f64) -> Self {
        CoherenceDetunings {
            nu34: self.nu34 + x,
            nu42: self.nu42,
            nu21: self.nu21 + x,
            nu31: self.nu31 + 2.0 * x,
        }
    }
}

/// Steady state of the undisturbed Lambda subsystem: the pure dark state
/// |D> = (Omega_2 |1> - Omega_1 |4>)/sqrt(Omega_1^2 + Omega_2^2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DarkStateSolution {
    pub rho11: f64,
    pub rho44: f64,
    /// Real Raman coherence rho~_41; the cross-coupling terms are
    /// proportional to it.
    pub rho41: f64,
}

impl DarkStateSolution {
    /// rho55 and the optical coherences with |5> vanish identically.
    pub fn rho55(&self) -> f64 {
        0.0
    }

    /// Same populations with the Raman coherence zeroed; used by the
    /// non-chiral control spectra where the cross-couplings are switched
    /// off by hand.
    pub fn without_coherence(&self) -> Self {
        DarkStateSolution { rho41: 0.0, ..*self }
    }
}

/// Dark-state populations and coherence for drive Rabi frequencies
/// Omega_1, Omega_2:
/// rho11 = Omega_2^2/N, rho44 = Omega_1^2/N, rho~_41 = -Omega_1 Omega_2/N
/// with N = Omega_1^2 + Omega_2^2.
pub fn dark_state_populations(rabi1: f64, rabi2: f64) -> Result<DarkStateSolution> {
    let norm = rabi1 * rabi1 + rabi2 * rabi2;
    if norm <= 0.0 {
        return Err(Error::DegenerateDrive);
    }
    Ok(DarkStateSolution {
        rho11: rabi2 * rabi2 / norm,
        rho44: rabi1 * rabi1 / norm,
        rho41: -rabi1 * rabi2 / norm,
    })
}
