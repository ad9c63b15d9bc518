//! Angle- and polarization-resolved response of the Zeeman-resolved
//! scheme: angle-dependent coupling Rabi components, the 3x3 response
//! tensors in the circular basis, the closed-form angle-dependent index,
//! and a numeric Helmholtz-determinant solver as a cross-check.
//!
//! Tensors are stored in the circular basis {e+, e-, e_z} with
//! e+- = (e_x +- i e_y)/sqrt(2). The propagation direction is the
//! quantization axis; the orientation angles describe the coupling-field
//! polarization relative to it.

use crate::error::{Error, Result};
use crate::medium::{BranchFlag, RefractiveResult};
use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

/// Polar angles of the coupling-field polarization in the k-frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Orientation {
    pub theta: f64,
    pub phi: f64,
}

impl Orientation {
    pub fn new(theta: f64, phi: f64) -> Self {
        Orientation { theta, phi }
    }
}

/// 3x3 complex tensor in the circular basis {+, -, z}.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarTensor3 {
    pub m: Matrix3<Complex64>,
}

fn circular_frame() -> Matrix3<Complex64> {
    // columns are e+, e-, e_z in Cartesian components
    let s = 1.0 / 2.0_f64.sqrt();
    Matrix3::new(
        Complex64::new(s, 0.0),
        Complex64::new(s, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, s),
        Complex64::new(0.0, -s),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
    )
}

impl PolarTensor3 {
    pub fn from_circular(m: Matrix3<Complex64>) -> Self {
        PolarTensor3 { m }
    }

    /// Diagonal tensor with the given circular components (xi+, xi-, xi_z).
    pub fn from_circular_diagonal(plus: Complex64, minus: Complex64, z: Complex64) -> Self {
        PolarTensor3 {
            m: Matrix3::from_diagonal(&Vector3::new(plus, minus, z)),
        }
    }

    pub fn scalar(value: Complex64) -> Self {
        Self::from_circular_diagonal(value, value, value)
    }

    /// Cartesian representation U m U^dagger with U = [e+ e- e_z].
    pub fn to_cartesian(&self) -> Matrix3<Complex64> {
        let u = circular_frame();
        u * self.m * u.adjoint()
    }

    /// Inverse basis change from a Cartesian matrix.
    pub fn from_cartesian(cart: &Matrix3<Complex64>) -> Self {
        let u = circular_frame();
        PolarTensor3 { m: u.adjoint() * cart * u }
    }
}

/// The six Zeeman-resolved coupling Rabi frequencies (rad/s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RabiComponents {
    pub wpp: Complex64,
    pub wmm: Complex64,
    pub wp0: Complex64,
    pub w0m: Complex64,
    pub wm0: Complex64,
    pub w0p: Complex64,
}

impl RabiComponents {
    pub fn norm_squared_sum(&self) -> f64 {
        [self.wpp, self.wmm, self.wp0, self.w0m, self.wm0, self.w0p]
            .iter()
            .map(|w| w.norm_sqr())
            .sum()
    }
}

/// Angle-dependent coupling Rabi components for a coupling field of
/// reduced Rabi frequency `omegac0` polarized along (theta, phi):
/// W++ = Omega_c0 cos(theta) = -W--,
/// W+0 = (Omega_c0/sqrt2) sin(theta) e^{-i phi} = W0-,
/// W-0 = (Omega_c0/sqrt2) sin(theta) e^{+i phi} = W0+.
pub fn angle_rabi(omegac0: f64, o: &Orientation) -> RabiComponents {
    let ct = o.theta.cos();
    let st = o.theta.sin();
    let em = Complex64::from_polar(1.0, -o.phi);
    let ep = Complex64::from_polar(1.0, o.phi);
    let wpp = Complex64::new(omegac0 * ct, 0.0);
    let side = omegac0 / 2.0_f64.sqrt() * st;
    RabiComponents {
        wpp,
        wmm: -wpp,
        wp0: side * em,
        w0m: side * em,
        wm0: side * ep,
        w0p: side * ep,
    }
}

/// Cross-coupling tensor for the electrically induced magnetization (and,
/// with the other scalar, the magnetically induced polarization):
/// the orientation-structure matrix times the scalar coefficient.
pub fn cross_tensor(o: &Orientation, scalar: Complex64) -> PolarTensor3 {
    let ct = Complex64::new(o.theta.cos(), 0.0);
    let st = o.theta.sin() / 2.0_f64.sqrt();
    let em = st * Complex64::from_polar(1.0, -o.phi);
    let ep = st * Complex64::from_polar(1.0, o.phi);
    let zero = Complex64::new(0.0, 0.0);
    let m = Matrix3::new(
        ct, zero, em, //
        zero, -ct, ep, //
        ep, em, zero,
    );
    PolarTensor3 { m: m * scalar }
}

/// Electric polarizability tensor: alphaEE times identity plus the
/// coupling-dressed correction matrix scaled by
/// alphaEE |Omega_c|^2 / (D42 D34).
pub fn ee_tensor(
    o: &Orientation,
    alpha_ee: Complex64,
    omegac_abs: f64,
    d42: Complex64,
    d34: Complex64,
) -> Result<PolarTensor3> {
    dressed_tensor(o, alpha_ee, omegac_abs, d42, d34)
}

/// Magnetic polarizability tensor: identical structure with
/// alphaBB and D31 D21.
pub fn bb_tensor(
    o: &Orientation,
    alpha_bb: Complex64,
    omegac_abs: f64,
    d31: Complex64,
    d21: Complex64,
) -> Result<PolarTensor3> {
    dressed_tensor(o, alpha_bb, omegac_abs, d31, d21)
}

fn dressed_tensor(
    o: &Orientation,
    alpha: Complex64,
    omegac_abs: f64,
    da: Complex64,
    db: Complex64,
) -> Result<PolarTensor3> {
    let dd = da * db;
    if dd.norm() == 0.0 {
        return Err(Error::SingularCorrection);
    }
    let ct = o.theta.cos();
    let st = o.theta.sin();
    let s2 = st * st;
    let sc = st * ct;
    let sqrt2 = 2.0_f64.sqrt();
    let e_p = |k: f64| Complex64::from_polar(1.0, k * o.phi);
    let m = Matrix3::new(
        Complex64::new(s2 / 8.0, 0.0),
        -s2 / 8.0 * e_p(2.0),
        -sc / (4.0 * sqrt2) * e_p(1.0),
        -s2 / 8.0 * e_p(-2.0),
        Complex64::new(s2 / 8.0, 0.0),
        // sin(2 theta)/(8 sqrt2) = sin cos/(4 sqrt2)
        sc / (4.0 * sqrt2) * e_p(-1.0),
        -sc / (4.0 * sqrt2) * e_p(-1.0),
        sc / (4.0 * sqrt2) * e_p(1.0),
        Complex64::new(ct * ct / 4.0, 0.0),
    );
    let correction = alpha * Complex64::new(omegac_abs * omegac_abs, 0.0) / dd;
    let identity = Matrix3::from_diagonal_element(alpha);
    Ok(PolarTensor3 { m: identity + m * correction })
}

/// Closed-form angle-dependent index for isotropic eps, mu:
/// n = sqrt(eps mu - xi_EH xi_HE - (xi_EH - xi_HE)^2 cos^2(theta)/4)
///   + (i/2)(xi_EH - xi_HE) cos(theta),
/// identical for both circular polarizations. Branch selection matches
/// `medium::refractive_index`.
pub fn index_vs_angle(
    eps: Complex64,
    mu: Complex64,
    xi_eh: Complex64,
    xi_he: Complex64,
    theta: f64,
) -> RefractiveResult {
    let ct = Complex64::new(theta.cos(), 0.0);
    let diff = xi_eh - xi_he;
    let root = (eps * mu - xi_eh * xi_he - diff * diff * ct * ct / 4.0).sqrt();
    let additive = Complex64::i() / 2.0 * diff * ct;
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
    RefractiveResult { n, fom: crate::medium::figure_of_merit(n), branch_flag }
}

/// Roots of the Helmholtz determinant together with degeneracy handling.
#[derive(Debug, Clone)]
pub struct HelmholtzRoots {
    /// All complex index roots, passivity-preferred then by descending Re.
    pub roots: Vec<Complex64>,
    /// Set when the leading quartic coefficient vanished and a reduced
    /// order polynomial was solved.
    pub reduced_order: bool,
}

/// Orientation-fixing cross-product matrix: for khat = z the circular
/// basis vectors are eigenvectors with K e+- = +-i e+-, which makes the
/// determinant roots agree sign-for-sign with the closed-form circular
/// dispersion relations.
fn k_matrix(khat: &[f64; 3]) -> Matrix3<Complex64> {
    let c = |v: f64| Complex64::new(v, 0.0);
    -Matrix3::new(
        c(0.0),
        c(-khat[2]),
        c(khat[1]),
        c(khat[2]),
        c(0.0),
        c(-khat[0]),
        c(-khat[1]),
        c(khat[0]),
        c(0.0),
    )
}

/// All complex refractive-index roots n of
/// det[eps + (xi_EH + n K) mu^{-1} (n K - xi_HE)] = 0
/// for propagation along `khat`. The determinant is a quartic in n
/// (the longitudinal mode drops out); its coefficients are recovered
/// exactly from five sample evaluations and the quartic is solved by
/// simultaneous (Weierstrass) iteration with Newton polishing. Nearly
/// coincident pairs — polarization-degenerate media — are refined on the
/// derivative polynomial to keep full precision.
pub fn helmholtz_index_numeric(
    eps_t: &PolarTensor3,
    mu_t: &PolarTensor3,
    xi_eh_t: &PolarTensor3,
    xi_he_t: &PolarTensor3,
    khat: &[f64; 3],
) -> Result<HelmholtzRoots> {
    let norm = (khat[0] * khat[0] + khat[1] * khat[1] + khat[2] * khat[2]).sqrt();
    if norm == 0.0 {
        return Err(Error::ZeroWavevector);
    }
    let unit = [khat[0] / norm, khat[1] / norm, khat[2] / norm];
    let eps = eps_t.to_cartesian();
    let mu = mu_t.to_cartesian();
    let xi_eh = xi_eh_t.to_cartesian();
    let xi_he = xi_he_t.to_cartesian();
    let mu_inv = mu.try_inverse().ok_or(Error::SingularPermeability)?;
    let k = k_matrix(&unit);
    let det_at = |n: Complex64| -> Complex64 {
        let m = eps + (xi_eh + k * n) * mu_inv * (k * n - xi_he);
        m.determinant()
    };
    // five-point interpolation of the quartic, nodes scaled to the tensor
    // magnitude so the Vandermonde system stays well conditioned
    let scale = (eps.norm() / 3.0).max(mu.norm() / 3.0).max(1.0).sqrt();
    let nodes: [Complex64; 5] = [0.0, 1.0, -1.0, 2.0, -2.0].map(|t| Complex64::new(t * scale, 0.0));
    let values: Vec<Complex64> = nodes.iter().map(|&n| det_at(n)).collect();
    let coeffs = vandermonde_solve(&nodes, &values);
    let (roots, reduced_order) = solve_polynomial(&coeffs)?;
    let mut roots = polish_cluster_aware(&coeffs, roots);
    roots.sort_by(|a, b| {
        let pa = a.im >= 0.0;
        let pb = b.im >= 0.0;
        pb.cmp(&pa).then(b.re.total_cmp(&a.re))
    });
    Ok(HelmholtzRoots { roots, reduced_order })
}

/// Physical-root choice: prefer Im >= 0; among those follow the previous
/// root when sweeping, else take the largest Re.
pub fn select_physical_root(roots: &[Complex64], previous: Option<Complex64>) -> Complex64 {
    let passive: Vec<Complex64> =
        roots.iter().copied().filter(|r| r.im >= 0.0).collect();
    let pool: &[Complex64] = if passive.is_empty() { roots } else { &passive };
    match previous {
        Some(prev) => pool
            .iter()
            .copied()
            .min_by(|a, b| (a - prev).norm().total_cmp(&(b - prev).norm()))
            .unwrap(),
        None => pool
            .iter()
            .copied()
            .max_by(|a, b| a.re.total_cmp(&b.re))
            .unwrap(),
    }
}

fn vandermonde_solve(nodes: &[Complex64; 5], values: &[Complex64]) -> [Complex64; 5] {
    // Lagrange-form accumulation of the interpolating polynomial
    let mut coeffs = [Complex64::new(0.0, 0.0); 5];
    for (i, &xi) in nodes.iter().enumerate() {
        // basis polynomial prod_{j!=i} (x - xj)/(xi - xj)
        let mut basis = [Complex64::new(0.0, 0.0); 5];
        basis[0] = Complex64::new(1.0, 0.0);
        let mut degree = 0;
        let mut denom = Complex64::new(1.0, 0.0);
        for (j, &xj) in nodes.iter().enumerate() {
            if j == i {
                continue;
            }
            denom *= xi - xj;
            // multiply basis by (x - xj)
            degree += 1;
            for d in (1..=degree).rev() {
                basis[d] = basis[d - 1] - xj * basis[d];
            }
            basis[0] *= -xj;
        }
        let w = values[i] / denom;
        for d in 0..5 {
            coeffs[d] += w * basis[d];
        }
    }
    coeffs
}

/// Roots of sum_k c[k] x^k with degenerate-degree reduction; returns the
/// flag when the quartic coefficient had to be dropped.
fn solve_polynomial(coeffs: &[Complex64; 5]) -> Result<(Vec<Complex64>, bool)> {
    let max_c = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if max_c == 0.0 {
        return Ok((Vec::new(), false));
    }
    let mut degree = 4;
    while degree > 0 && coeffs[degree].norm() < 1e-14 * max_c {
        degree -= 1;
    }
    let reduced = degree < 4;
    if degree == 0 {
        return Ok((Vec::new(), reduced));
    }
    let lead = coeffs[degree];
    let monic: Vec<Complex64> = (0..degree).map(|k| coeffs[k] / lead).collect();
    // Weierstrass (Durand-Kerner) simultaneous iteration
    let radius = 1.0
        + monic.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> =
        (0..degree).map(|k| seed.powu(k as u32 + 1) * radius).collect();
    let eval = |z: Complex64| -> Complex64 {
        let mut acc = Complex64::new(1.0, 0.0);
        for k in (0..degree).rev() {
            acc = acc * z + monic[k];
        }
        acc
    };
    for _ in 0..200 {
        let mut moved: f64 = 0.0;
        for i in 0..degree {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..degree {
                if j != i {
                    denom *= roots[i] - roots[j];
                }
            }
            if denom.norm() == 0.0 {
                // perturb coincident iterates
                roots[i] += Complex64::new(1e-8 * radius, 1e-8 * radius);
                continue;
            }
            let delta = eval(roots[i]) / denom;
            roots[i] -= delta;
            moved = moved.max(delta.norm());
        }
        if moved < 1e-14 * radius.max(1.0) {
            break;
        }
    }
    Ok((roots, reduced))
}

/// Newton-polishes simple roots on p and near-double pairs on p', which
/// restores quadratic convergence where the quartic degenerates into the
/// polarization-degenerate double roots.
fn polish_cluster_aware(coeffs: &[Complex64; 5], roots: Vec<Complex64>) -> Vec<Complex64> {
    let eval = |cs: &[Complex64], z: Complex64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in cs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    };
    let derive = |cs: &[Complex64]| -> Vec<Complex64> {
        cs.iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| Complex64::new(k as f64, 0.0) * c)
            .collect()
    };
    let p: Vec<Complex64> = coeffs.to_vec();
    let dp = derive(&p);
    let ddp = derive(&dp);
    let newton = |num: &[Complex64], den: &[Complex64], mut z: Complex64| -> Complex64 {
        for _ in 0..64 {
            let d = eval(den, z);
            if d.norm() == 0.0 {
                break;
            }
            let step = eval(num, z) / d;
            z -= step;
            if step.norm() <= 1e-16 * z.norm().max(1.0) {
                break;
            }
        }
        z
    };
    let n = roots.len();
    let mut out = Vec::with_capacity(n);
    let mut used = vec![false; n];
    for i in 0..n {
        if used[i] {
            continue;
        }
        let scale = roots[i].norm().max(1.0);
        let partner = (i + 1..n)
            .find(|&j| !used[j] && (roots[j] - roots[i]).norm() < 1e-4 * scale);
        if let Some(j) = partner {
            used[j] = true;
            let z = newton(&dp, &ddp, (roots[i] + roots[j]) / 2.0);
            out.push(z);
            out.push(z);
        } else {
            out.push(newton(&p, &dp, roots[i]));
        }
        used[i] = true;
    }
    out
}
