//! End-to-end evaluation: detuning to polarizabilities to macroscopic
//! response to index, figure of merit and impedance, plus the
//! impedance-matching search the CLI exposes.

use crate::error::Result;
use crate::medium::{
    inverse_impedance, local_field_correct, refractive_index, Handedness, MediumResponse,
    RefractiveResult,
};
use crate::params::{dark_state_populations, DarkStateSolution, ProbeDetunings, SystemParams};
use crate::response::{
    apply_doppler, polarizability_quartet, quartet_at, BroadeningSpec, PolarizabilityQuartet,
};
use num_complex::Complex64;

/// Full single-point response of the pipeline.
#[derive(Debug, Clone)]
pub struct PointResponse {
    pub quartet: PolarizabilityQuartet,
    pub medium: MediumResponse,
    pub index: RefractiveResult,
    pub z_inv: Complex64,
}

/// Fixed inputs of a sweep: parameters, dark state, broadening, density.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub params: SystemParams,
    pub dark: DarkStateSolution,
    pub broadening: BroadeningSpec,
    pub density: f64,
    pub handedness: Handedness,
}

impl Pipeline {
    pub fn new(params: SystemParams, broadening: BroadeningSpec, density: f64) -> Result<Self> {
        let dark = dark_state_populations(params.rabi1, params.rabi2)?;
        Ok(Pipeline { params, dark, broadening, density, handedness: Handedness::Plus })
    }

    /// Zeroes the Raman coherence so the cross couplings vanish
    /// identically while eps and mu keep their dressed forms.
    pub fn nonchiral(mut self) -> Self {
        self.dark = self.dark.without_coherence();
        self
    }

    /// Evaluates the pipeline at sweep detuning Delta (rad/s).
    pub fn at(&self, delta: f64) -> Result<PointResponse> {
        self.at_detunings(&ProbeDetunings::from_sweep(delta, 0.0))
    }

    pub fn at_detunings(&self, det: &ProbeDetunings) -> Result<PointResponse> {
        let quartet = if self.broadening.doppler_sigma > 0.0 {
            apply_doppler(
                |nu| quartet_at(&self.params, nu, &self.dark, self.broadening.gammap),
                &self.broadening,
                det,
            )?
        } else {
            polarizability_quartet(&self.params, det, &self.dark, &self.broadening)?
        };
        let medium = local_field_correct(&quartet, self.density)?;
        let index = refractive_index(&medium, self.handedness);
        let z_inv = inverse_impedance(&medium);
        Ok(PointResponse { quartet, medium, index, z_inv })
    }
}

/// Result of the impedance-matching search.
#[derive(Debug, Clone)]
pub struct ImpedanceMatch {
    /// Sweep detuning Delta (rad/s) of the located point.
    pub delta: f64,
    /// Coupling Rabi magnitude (rad/s) of the located point.
    pub omegac_abs: f64,
    pub z_inv: Complex64,
    pub index: RefractiveResult,
    pub response: PointResponse,
    /// Whether |Z^-1 - 1| came in under the requested cap.
    pub matched: bool,
}

/// Deterministic search for the operating point that is impedance matched
/// to vacuum while the index sits at n = -1.
///
/// The matching condition alone fixes a one-parameter curve in the
/// (Delta, |Omega_c|) plane, so |Z^-1 - 1| is minimized along Delta at
/// each |Omega_c| (coarse grid plus golden-section refinement) and the
/// remaining freedom is used to bring n to -1 (outer golden section over
/// |Omega_c|).
pub fn impedance_find(
    params: &SystemParams,
    broadening: &BroadeningSpec,
    density: f64,
    delta_window: (f64, f64),
    omegac_range: (f64, f64),
    cap: f64,
) -> Result<ImpedanceMatch> {
    let base = Pipeline::new(params.clone(), *broadening, density)?;
    let eval = |delta: f64, omegac: f64| -> Result<PointResponse> {
        let mut p = base.clone();
        p.params.rabic_abs = omegac;
        p.at(delta)
    };
    let z_err = |delta: f64, omegac: f64| -> f64 {
        eval(delta, omegac)
            .map(|r| (r.z_inv - Complex64::new(1.0, 0.0)).norm())
            .unwrap_or(f64::INFINITY)
    };

    let matched_delta = |omegac: f64| -> f64 {
        let m = 401;
        let (lo, hi) = delta_window;
        let step = (hi - lo) / (m - 1) as f64;
        let mut best = (f64::INFINITY, lo);
        for k in 0..m {
            let d = lo + step * k as f64;
            let e = z_err(d, omegac);
            if e < best.0 {
                best = (e, d);
            }
        }
        golden_min(
            |d| z_err(d, omegac),
            (best.1 - step).max(lo),
            (best.1 + step).min(hi),
            80,
        )
    };
    let n_err = |omegac: f64| -> f64 {
        let d = matched_delta(omegac);
        eval(d, omegac)
            .map(|r| (r.index.n + Complex64::new(1.0, 0.0)).norm())
            .unwrap_or(f64::INFINITY)
    };

    // coarse outer grid, then golden refinement on |n + 1|
    let m = 69;
    let (olo, ohi) = omegac_range;
    let ostep = (ohi - olo) / (m - 1) as f64;
    let mut best = (f64::INFINITY, olo);
    for k in 0..m {
        let oc = olo + ostep * k as f64;
        let e = n_err(oc);
        if e < best.0 {
            best = (e, oc);
        }
    }
    let omegac = golden_min(n_err, (best.1 - ostep).max(olo), (best.1 + ostep).min(ohi), 60);
    let delta = matched_delta(omegac);
    let response = eval(delta, omegac)?;
    let z_inv = response.z_inv;
    let matched = (z_inv - Complex64::new(1.0, 0.0)).norm() < cap;
    Ok(ImpedanceMatch {
        delta,
        omegac_abs: omegac,
        z_inv,
        index: response.index,
        response,
        matched,
    })
}

/// Golden-section minimizer with a relative step floor of 1e-10.
pub fn golden_min<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, iters: usize) -> f64 {
    let g = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if (b - a).abs() <= 1e-10 * (a.abs() + b.abs()).max(1e-300) {
            break;
        }
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    (a + b) / 2.0
}
