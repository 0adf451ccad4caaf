//! The induced balanced metric, its conformal family, the holomorphic volume
//! form, and the identities they satisfy.

use crate::acs::AcsField;
use crate::error::{KernelError, Result};
use crate::exterior::{basis_masks, basis_rank, mask_letters, wedge_vectors};
use crate::fiber::{mat_i, mat_j, mat_k, omega_coeffs, Quat};
use crate::forms::{du_form, dv_form, FormField};
use crate::grid::ChartGrid;
use crate::jet::BaseJet;
use crate::jet6::Jet6;
use crate::jetform::{cotangent_jet, JetForm};
use crate::weierstrass::{GaussGrid, GaussJets, WeierstrassChart};
use nalgebra::Matrix6;
use num_complex::Complex64;

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn cz() -> Complex64 {
    c64(0.0, 0.0)
}

/// Real polynomial in (u, v), used for seeded smooth conformal exponents.
#[derive(Clone, Debug)]
pub struct ScalarPoly {
    pub terms: Vec<(u32, u32, f64)>,
}

impl ScalarPoly {
    pub fn eval(&self, u: f64, v: f64) -> f64 {
        self.terms.iter().map(|&(i, j, c)| c * u.powi(i as i32) * v.powi(j as i32)).sum()
    }

    pub fn eval_jet(&self, z: Complex64) -> BaseJet {
        let u = BaseJet::variable_u(z.re);
        let v = BaseJet::variable_v(z.im);
        let mut acc = BaseJet::real_constant(0.0);
        for &(i, j, c) in &self.terms {
            acc = acc.add(&u.powi(i).mul(&v.powi(j)).scale(c64(c, 0.0)));
        }
        acc
    }

    /// Seeded random cubic with mild coefficients.
    pub fn random_smooth(seed: u64) -> ScalarPoly {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut terms = Vec::new();
        for i in 0..=3u32 {
            for j in 0..=3u32 {
                if i + j > 3 {
                    continue;
                }
                terms.push((i, j, rng.gen_range(-0.4..0.4) / (1.0 + (i + j) as f64)));
            }
        }
        ScalarPoly { terms }
    }
}

/// Degeneracy mask configuration for the conformal family.
#[derive(Clone, Copy, Debug)]
pub struct MaskConfig {
    /// points with energy below rel_threshold * (chart max) are masked
    pub rel_threshold: f64,
    /// masked set is dilated by this many cells so no stencil reaches in
    pub guard_cells: usize,
}

impl Default for MaskConfig {
    fn default() -> Self {
        MaskConfig { rel_threshold: 1e-8, guard_cells: 3 }
    }
}

/// Conformal exponent choices for omega_f.
#[derive(Clone, Debug)]
pub enum ConformalFactor {
    Zero,
    Poly(ScalarPoly),
    /// e^{2f} = (alpha'/8) |dG|^2, the explicit anomaly-matching exponent
    Strominger { alpha_prime: f64 },
    /// deliberately miscalibrated control e^{2f} = (alpha'/4) |dG|^2
    StromingerMiscalibrated { alpha_prime: f64 },
}

impl ConformalFactor {
    /// Per-point values and mask (true = excluded).
    pub fn values_and_mask(&self, gauss: &GaussGrid, cfg: &MaskConfig) -> (Vec<f64>, Vec<bool>) {
        let npts = gauss.grid.npts();
        match self {
            ConformalFactor::Zero => (vec![0.0; npts], vec![false; npts]),
            ConformalFactor::Poly(p) => (
                gauss
                    .grid
                    .points()
                    .map(|(_, z)| p.eval(z.re, z.im))
                    .collect(),
                vec![false; npts],
            ),
            ConformalFactor::Strominger { alpha_prime }
            | ConformalFactor::StromingerMiscalibrated { alpha_prime } => {
                let denom = match self {
                    ConformalFactor::StromingerMiscalibrated { .. } => 4.0,
                    _ => 8.0,
                };
                let thresh = cfg.rel_threshold * gauss.dg2_max;
                let mut vals = vec![0.0; npts];
                let mut mask = vec![false; npts];
                for (i, p) in gauss.pts.iter().enumerate() {
                    if p.dg2[0] <= thresh {
                        mask[i] = true;
                    } else {
                        vals[i] = 0.5 * (alpha_prime * p.dg2[0] / denom).ln();
                    }
                }
                dilate_mask(&mut mask, &gauss.grid, cfg.guard_cells);
                (vals, mask)
            }
        }
    }

    /// Exact jet at a point; None where masked or undefined.
    pub fn jet_at(&self, gj: &GaussJets, z: Complex64, gauss_dg2_max: f64, cfg: &MaskConfig) -> Option<BaseJet> {
        match self {
            ConformalFactor::Zero => Some(BaseJet::real_constant(0.0)),
            ConformalFactor::Poly(p) => Some(p.eval_jet(z)),
            ConformalFactor::Strominger { alpha_prime } => {
                if gj.dg2.val().re <= cfg.rel_threshold * gauss_dg2_max {
                    return None;
                }
                Some(gj.dg2.scale(c64(alpha_prime / 8.0, 0.0)).ln().scale(c64(0.5, 0.0)))
            }
            ConformalFactor::StromingerMiscalibrated { alpha_prime } => {
                if gj.dg2.val().re <= cfg.rel_threshold * gauss_dg2_max {
                    return None;
                }
                Some(gj.dg2.scale(c64(alpha_prime / 4.0, 0.0)).ln().scale(c64(0.5, 0.0)))
            }
        }
    }
}

fn dilate_mask(mask: &mut [bool], grid: &ChartGrid, cells: usize) {
    if cells == 0 || !mask.iter().any(|&m| m) {
        return;
    }
    let n = grid.n as isize;
    let c = cells as isize;
    let orig = mask.to_vec();
    for iv in 0..n {
        for iu in 0..n {
            if orig[(iv * n + iu) as usize] {
                for dv in -c..=c {
                    for du in -c..=c {
                        let (ju, jv) = (iu + du, iv + dv);
                        if ju >= 0 && ju < n && jv >= 0 && jv < n {
                            mask[(jv * n + ju) as usize] = true;
                        }
                    }
                }
            }
        }
    }
}

/// Solve the Strominger exponent on the grid; fails on a constant Gauss map.
pub fn strominger_exponent(
    gauss: &GaussGrid,
    alpha_prime: f64,
    cfg: &MaskConfig,
) -> Result<(Vec<f64>, Vec<bool>)> {
    if gauss.dg2_max < 1e-14 {
        return Err(KernelError::Degenerate(
            "Gauss map constant; solution degenerates identically".into(),
        ));
    }
    let (vals, mask) = ConformalFactor::Strominger { alpha_prime }.values_and_mask(gauss, cfg);
    let frac = mask.iter().filter(|&&m| m).count() as f64 / mask.len() as f64;
    if frac > 0.2 {
        return Err(KernelError::MaskedTooMuch(frac * 100.0));
    }
    Ok((vals, mask))
}

/// The fiber 2-form alpha w_I + beta w_J + gamma w_K over the grid.
pub fn fiber_combination_field(gauss: &GaussGrid) -> FormField {
    let grid = gauss.grid;
    let npts = grid.npts();
    let mut f = FormField::zero(grid, 2);
    let pairs: [(Quat, fn(&crate::weierstrass::GaussPoint) -> f64); 3] = [
        (Quat::I, |p| p.alpha[0]),
        (Quat::J, |p| p.beta[0]),
        (Quat::K, |p| p.gamma[0]),
    ];
    for (q, get) in pairs {
        let coeffs = omega_coeffs(q);
        for (b, &c) in coeffs.iter().enumerate() {
            if c == cz() {
                continue;
            }
            for i in 0..npts {
                f.c[b * npts + i] += c * get(&gauss.pts[i]);
            }
        }
    }
    f
}

/// omega_0 = lambda du^dv + alpha w_I + beta w_J + gamma w_K.
pub fn omega0(gauss: &GaussGrid) -> Result<FormField> {
    for p in &gauss.pts {
        if p.lambda[0] <= 0.0 {
            return Err(KernelError::Degenerate("lambda <= 0 on the grid".into()));
        }
    }
    let grid = gauss.grid;
    let lam: Vec<Complex64> = gauss.pts.iter().map(|p| c64(p.lambda[0], 0.0)).collect();
    let base = du_form(grid).wedge(&dv_form(grid))?.mul_scalar(&lam);
    Ok(base.add(&fiber_combination_field(gauss))?.with_tag(1, 1))
}

/// omega_f = e^{2f} lambda du^dv + e^f (alpha w_I + beta w_J + gamma w_K).
/// Masked points get coefficient 0; residual statistics must skip them.
pub fn omega_f(gauss: &GaussGrid, f: &[f64], mask: &[bool]) -> Result<FormField> {
    let frac = mask.iter().filter(|&&m| m).count() as f64 / mask.len() as f64;
    if frac > 0.2 {
        return Err(KernelError::MaskedTooMuch(frac * 100.0));
    }
    let grid = gauss.grid;
    let e2f: Vec<Complex64> = gauss
        .pts
        .iter()
        .zip(f.iter().zip(mask.iter()))
        .map(|(p, (&fi, &m))| if m { cz() } else { c64(p.lambda[0] * (2.0 * fi).exp(), 0.0) })
        .collect();
    let ef: Vec<Complex64> =
        f.iter().zip(mask.iter()).map(|(&fi, &m)| if m { cz() } else { c64(fi.exp(), 0.0) }).collect();
    let base = du_form(grid).wedge(&dv_form(grid))?.mul_scalar(&e2f);
    Ok(base.add(&fiber_combination_field(gauss).mul_scalar(&ef))?.with_tag(1, 1))
}

/// Antisymmetric matrix of a 2-form coefficient vector.
pub fn two_form_matrix(coeffs: &[Complex64]) -> Matrix6<f64> {
    let mut w = Matrix6::zeros();
    for (b, &mask) in basis_masks(2).iter().enumerate() {
        let ls: Vec<usize> = mask_letters(mask).collect();
        w[(ls[0], ls[1])] = coeffs[b].re;
        w[(ls[1], ls[0])] = -coeffs[b].re;
    }
    w
}

/// Symmetric metric g(X, Y) = omega(X, J Y) at a point.
pub fn metric_matrix(omega_coeffs: &[Complex64], j: &Matrix6<f64>) -> Matrix6<f64> {
    let w = two_form_matrix(omega_coeffs);
    let gm = w * j;
    0.5 * (gm + gm.transpose())
}

/// Minimum metric eigenvalue over masked interior points.
pub fn positivity_min_eig(omega: &FormField, acs: &AcsField, mask: &[bool]) -> f64 {
    let mut min_eig = f64::INFINITY;
    for i in 0..omega.grid.npts() {
        if mask[i] || !omega.grid.is_interior(i) {
            continue;
        }
        let g = metric_matrix(&omega.at(i), &acs.mats[i]);
        let eig = g.symmetric_eigenvalues();
        for k in 0..6 {
            min_eig = min_eig.min(eig[k]);
        }
    }
    min_eig
}

/// Hermitian-invariance residual max |omega(J., J.) - omega|.
pub fn hermitian_residual(omega: &FormField, acs: &AcsField) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..omega.grid.npts() {
        if !omega.grid.is_interior(i) {
            continue;
        }
        let w = two_form_matrix(&omega.at(i));
        let m = &acs.mats[i];
        worst = worst.max((m.transpose() * w * m - w).amax());
    }
    worst
}

/// The restricted ambient coframe e^j|_X = Re(phi_j dz), j = 1, 2, 3.
pub fn ambient_one_forms(gauss: &GaussGrid) -> [FormField; 3] {
    let grid = gauss.grid;
    let npts = grid.npts();
    let mut out: Vec<FormField> = Vec::new();
    for j in 0..3 {
        let mut f = FormField::zero(grid, 1);
        for i in 0..npts {
            let phi = gauss.pts[i].phi[j];
            f.c[i] = c64(phi.re, 0.0);
            f.c[npts + i] = c64(-phi.im, 0.0);
        }
        out.push(f);
    }
    [out[0].clone(), out[1].clone(), out[2].clone()]
}

/// The holomorphic volume form Omega = Omega_1 + i Omega_2.
pub struct VolumeForm {
    pub omega1: FormField,
    pub omega2: FormField,
    pub complex: FormField,
}

pub fn big_omega(gauss: &GaussGrid) -> Result<VolumeForm> {
    let grid = gauss.grid;
    let [e1, e2, e3] = ambient_one_forms(gauss);
    let wi = FormField::constant(grid, 2, &omega_coeffs(Quat::I));
    let wj = FormField::constant(grid, 2, &omega_coeffs(Quat::J));
    let wk = FormField::constant(grid, 2, &omega_coeffs(Quat::K));
    let alpha: Vec<Complex64> = gauss.pts.iter().map(|p| c64(p.alpha[0], 0.0)).collect();
    let beta: Vec<Complex64> = gauss.pts.iter().map(|p| c64(p.beta[0], 0.0)).collect();
    let gamma: Vec<Complex64> = gauss.pts.iter().map(|p| c64(p.gamma[0], 0.0)).collect();

    let omega1 = e1.wedge(&wi)?.add(&e2.wedge(&wj)?)?.add(&e3.wedge(&wk)?)?;
    // Omega_2 = (-gamma e2 + beta e3)^w_I + (gamma e1 - alpha e3)^w_J
    //         + (-beta e1 + alpha e2)^w_K
    let t1 = e2.mul_scalar(&gamma).scale(c64(-1.0, 0.0)).add(&e3.mul_scalar(&beta))?.wedge(&wi)?;
    let t2 = e1.mul_scalar(&gamma).sub(&e3.mul_scalar(&alpha))?.wedge(&wj)?;
    let t3 = e1.mul_scalar(&beta).scale(c64(-1.0, 0.0)).add(&e2.mul_scalar(&alpha))?.wedge(&wk)?;
    let omega2 = t1.add(&t2)?.add(&t3)?;
    let complex = omega1.add(&omega2.scale(c64(0.0, 1.0)))?;
    Ok(VolumeForm { omega1, omega2, complex })
}

/// ||Omega||_omega and the (3,0)-expansion residual per grid point, by
/// expanding Omega in a g-unitary coframe of (1,0)-forms.
pub fn omega_norm(
    omega: &FormField,
    acs: &AcsField,
    big: &FormField,
    mask: &[bool],
) -> Result<(Vec<f64>, f64)> {
    let grid = omega.grid;
    let npts = grid.npts();
    let mut norms = vec![0.0f64; npts];
    let mut purity: f64 = 0.0;
    for i in 0..npts {
        if mask[i] {
            continue;
        }
        let m = &acs.mats[i];
        let g = metric_matrix(&omega.at(i), m);
        let ginv = g
            .try_inverse()
            .ok_or_else(|| KernelError::Degenerate(format!("singular metric at index {i}")))?;
        // columns of the (1,0) projector P = (1 - i C)/2, C = M^T on coefficients
        let mut cols: Vec<[Complex64; 6]> = Vec::with_capacity(6);
        for l in 0..6 {
            let mut col = [cz(); 6];
            for a in 0..6 {
                let delta = if a == l { 1.0 } else { 0.0 };
                // C[a][l] = M[l][a]
                col[a] = c64(0.5 * delta, -0.5 * m[(l, a)]);
            }
            cols.push(col);
        }
        let herm = |x: &[Complex64; 6], y: &[Complex64; 6]| -> Complex64 {
            let mut s = cz();
            for j in 0..6 {
                for k in 0..6 {
                    s += ginv[(j, k)] * x[j] * y[k].conj();
                }
            }
            s
        };
        // pivoted Gram-Schmidt to an orthonormal (1,0) coframe
        cols.sort_by(|a, b| herm(b, b).re.partial_cmp(&herm(a, a).re).unwrap());
        let mut theta: Vec<[Complex64; 6]> = Vec::new();
        for col in cols {
            let mut v = col;
            for t in &theta {
                let proj = herm(&v, t);
                for j in 0..6 {
                    v[j] -= proj * t[j];
                }
            }
            let nrm = herm(&v, &v).re;
            if nrm > 1e-18 {
                let inv = 1.0 / nrm.sqrt();
                for j in 0..6 {
                    v[j] *= inv;
                }
                theta.push(v);
                if theta.len() == 3 {
                    break;
                }
            }
        }
        if theta.len() < 3 {
            return Err(KernelError::Degenerate(format!("rank-deficient (1,0) space at {i}")));
        }
        let big_theta = wedge_vectors(&theta);
        let omega_vec = big.at(i);
        let (mut bmax, mut bidx) = (0.0f64, 0usize);
        for (b, t) in big_theta.iter().enumerate() {
            if t.norm() > bmax {
                bmax = t.norm();
                bidx = b;
            }
        }
        let coeff = omega_vec[bidx] / big_theta[bidx];
        let mut resid: f64 = 0.0;
        for b in 0..big_theta.len() {
            resid = resid.max((omega_vec[b] - coeff * big_theta[b]).norm());
        }
        norms[i] = coeff.norm();
        if grid.is_interior(i) {
            purity = purity.max(resid / coeff.norm().max(1e-30));
        }
    }
    Ok((norms, purity))
}

/// max |d(omega^2)| over the interior.
pub fn balanced_residual(omega: &FormField) -> Result<f64> {
    Ok(omega.wedge(omega)?.ext_d().max_interior_norm())
}

/// max |d(n omega^2)| for a scalar weight n (conformally balanced residual
/// with n = ||Omega||_{omega}).
pub fn weighted_balanced_residual(
    omega: &FormField,
    weight: &[f64],
    mask: &[bool],
) -> Result<f64> {
    let w: Vec<Complex64> = weight.iter().map(|&x| c64(x, 0.0)).collect();
    let form = omega.wedge(omega)?.mul_scalar(&w);
    let d = form.ext_d();
    Ok(d.max_masked_norm(|i| !mask[i]))
}

/// Pointwise residual of the squared-metric identity
/// omega_f^2 = 2 e^{3f} omega ^ Phi + 2 e^{2f} e4^e5^e6^e7.
pub fn omega_f_square_identity(gauss: &GaussGrid, f: &[f64], mask: &[bool]) -> Result<f64> {
    let grid = gauss.grid;
    let wf = omega_f(gauss, f, mask)?;
    let lhs = wf.wedge(&wf)?;
    let lam: Vec<Complex64> = gauss.pts.iter().map(|p| c64(p.lambda[0], 0.0)).collect();
    let e3f: Vec<Complex64> = f.iter().map(|&x| c64((3.0 * x).exp(), 0.0)).collect();
    let e2f: Vec<Complex64> = f.iter().map(|&x| c64((2.0 * x).exp(), 0.0)).collect();
    let base = du_form(grid).wedge(&dv_form(grid))?.mul_scalar(&lam);
    let t1 = base.wedge(&fiber_combination_field(gauss))?.mul_scalar(&e3f).scale(c64(2.0, 0.0));
    let mut volc = vec![cz(); 15];
    volc[basis_rank(0b111100)] = c64(1.0, 0.0);
    let vol4 = FormField::constant(grid, 4, &volc);
    let t2 = vol4.mul_scalar(&e2f).scale(c64(2.0, 0.0));
    let rhs = t1.add(&t2)?;
    Ok(lhs.sub(&rhs)?.max_masked_norm(|i| !mask[i]))
}

/// Exact i del delbar of a (1,1) form with per-point jet coefficients
/// provided by `eta_jets`, assembled into a grid 4-form.
pub fn i_del_delbar_field<F>(gauss: &GaussGrid, chart: &WeierstrassChart, mut eta_jets: F) -> Result<FormField>
where
    F: FnMut(&GaussJets, Complex64) -> JetForm,
{
    let grid = gauss.grid;
    let npts = grid.npts();
    let mut out = FormField::zero(grid, 4);
    for (i, z) in grid.points() {
        let gj = chart.gauss_at(z)?;
        let cot = cotangent_jet(&gj.alpha, &gj.beta, &gj.gamma);
        let eta = eta_jets(&gj, z);
        let dbar = crate::jetform::delbar(&eta, 1, 1, &cot);
        let ddbar = crate::jetform::del(&dbar, 1, 2, &cot);
        let vals = ddbar.values();
        for b in 0..15 {
            out.c[b * npts + i] = c64(0.0, 1.0) * vals[b];
        }
    }
    Ok(out)
}

/// Report of the balanced-repair construction around a ramification point at
/// the chart center.
#[derive(Clone, Debug)]
pub struct RepairReport {
    /// (t, minimal vertical eigenvalue of lambda_q at q)
    pub vertical_eigs: Vec<(f64, f64)>,
    /// smallest scanned t with positive vertical part
    pub t_threshold: Option<f64>,
    /// |d(omega_0^2 + c_q lambda_q)| residual at the chosen t
    pub closedness: f64,
    /// |d lambda_q| residual alone
    pub lambda_closedness: f64,
    /// minimum over sampled points and (1,0) directions of the (2,2)
    /// positivity pairing of omega_0^2 + c_q lambda_q
    pub positivity_min: f64,
    pub chosen_t: f64,
    pub cq: f64,
}

/// lambda_q = i del delbar ( f_t (alpha w_I + beta w_J + gamma w_K) ) with
/// f_t = (1 + |z|^2)^t centered at the chart origin.
pub fn repair_form(
    gauss: &GaussGrid,
    chart: &WeierstrassChart,
    t: f64,
) -> Result<FormField> {
    i_del_delbar_field(gauss, chart, |gj, z| {
        let u = BaseJet::variable_u(z.re);
        let v = BaseJet::variable_v(z.im);
        let ft = u
            .mul(&u)
            .add(&v.mul(&v))
            .add(&BaseJet::real_constant(1.0))
            .powf(t);
        let phi = JetForm::fiber_combination(
            &Jet6::from_base(&gj.alpha),
            &Jet6::from_base(&gj.beta),
            &Jet6::from_base(&gj.gamma),
        );
        phi.mul_jet(&Jet6::from_base(&ft))
    })
}

/// Vertical part of a 4-form at a point: the quadratic form
/// X -> sym(V(X, J_fib Y)) built from the du^dv^e^a^e^b coefficients.
pub fn vertical_min_eigenvalue(form: &FormField, acs: &AcsField, idx: usize) -> f64 {
    let coeffs = form.at(idx);
    let mut v = nalgebra::Matrix4::<f64>::zeros();
    for a in 2..6usize {
        for b in (a + 1)..6usize {
            let mask = 0b11u8 | (1 << a) | (1 << b);
            let c = coeffs[basis_rank(mask)].re;
            v[(a - 2, b - 2)] = c;
            v[(b - 2, a - 2)] = -c;
        }
    }
    let m = &acs.mats[idx];
    let mut jf = nalgebra::Matrix4::<f64>::zeros();
    for i in 0..4 {
        for j in 0..4 {
            jf[(i, j)] = m[(2 + i, 2 + j)];
        }
    }
    let q = v * jf;
    let sym = 0.5 * (q + q.transpose());
    let eig = sym.symmetric_eigenvalues();
    let mut min = f64::INFINITY;
    for k in 0..4 {
        min = min.min(eig[k]);
    }
    min
}

/// Positivity of a (2,2)-form: min over sampled interior points and random
/// (1,0)-forms rho of the coefficient of Psi ^ i rho ^ conj(rho).
pub fn positivity_22(psi: &FormField, acs: &AcsField, seed: u64, samples: usize) -> f64 {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let grid = psi.grid;
    let npts = grid.npts();
    let stride = (npts / samples.max(1)).max(1);
    let mut min = f64::INFINITY;
    let table = crate::exterior::wedge_table(4, 2);
    for i in (0..npts).step_by(stride) {
        if !grid.is_interior(i) {
            continue;
        }
        let m = &acs.mats[i];
        let psi_vec = psi.at(i);
        for _ in 0..6 {
            // random real covector pushed to its (1,0) part
            let mut rho = [cz(); 6];
            let mut norm2 = 0.0;
            for l in 0..6 {
                let r: f64 = rng.gen_range(-1.0..1.0);
                norm2 += r * r;
                for a in 0..6 {
                    let delta = if a == l { 1.0 } else { 0.0 };
                    rho[a] += c64(0.5 * delta * r, -0.5 * m[(l, a)] * r);
                }
            }
            if norm2 < 1e-6 {
                continue;
            }
            let scale = 1.0 / norm2.sqrt();
            for a in 0..6 {
                rho[a] *= scale;
            }
            let conj: [Complex64; 6] = std::array::from_fn(|a| rho[a].conj());
            let pair = wedge_vectors(&[rho, conj]);
            // i rho ^ conj(rho)
            let mut top = cz();
            for t in &table {
                top += psi_vec[t.ia] * (c64(0.0, 1.0) * pair[t.ib]) * t.sign;
            }
            min = min.min(top.re);
        }
    }
    min
}

/// Run the repair around the chart center for a sweep of t values.
pub fn balanced_repair(
    gauss: &GaussGrid,
    chart: &WeierstrassChart,
    acs: &AcsField,
    t_values: &[f64],
    cq: f64,
) -> Result<RepairReport> {
    let grid = gauss.grid;
    // index closest to the chart center
    let mut center = 0usize;
    let mut best = f64::INFINITY;
    for (i, z) in grid.points() {
        if z.norm() < best {
            best = z.norm();
            center = i;
        }
    }
    let mut vertical = Vec::new();
    let mut t_threshold = None;
    for &t in t_values {
        let lam_q = repair_form(gauss, chart, t)?;
        let eig = vertical_min_eigenvalue(&lam_q, acs, center);
        vertical.push((t, eig));
        if eig > 0.0 && t_threshold.is_none() {
            t_threshold = Some(t);
        }
    }
    let chosen_t = t_threshold.map(|t| t + 1.0).unwrap_or_else(|| {
        t_values.last().copied().unwrap_or(1.0)
    });
    let lam_q = repair_form(gauss, chart, chosen_t)?;
    let lambda_closedness = lam_q.ext_d().max_interior_norm();
    let w0 = omega0(gauss)?;
    let repaired = w0.wedge(&w0)?.add(&lam_q.scale(c64(cq, 0.0)))?;
    let closedness = repaired.ext_d().max_interior_norm();
    let positivity_min = positivity_22(&repaired, acs, 424242, 200);
    Ok(RepairReport {
        vertical_eigs: vertical,
        t_threshold,
        closedness,
        lambda_closedness,
        positivity_min,
        chosen_t,
        cq,
    })
}

/// Exact first-derivative 1-forms of the Gauss components.
pub fn gauss_exact_one_forms(gauss: &GaussGrid) -> (FormField, FormField, FormField) {
    let grid = gauss.grid;
    let mk = |get: fn(&crate::weierstrass::GaussPoint) -> (f64, f64)| {
        let du: Vec<Complex64> = gauss.pts.iter().map(|p| c64(get(p).0, 0.0)).collect();
        let dv: Vec<Complex64> = gauss.pts.iter().map(|p| c64(get(p).1, 0.0)).collect();
        FormField::exact_one_form(grid, du, dv)
    };
    (
        mk(|p| (p.alpha[1], p.alpha[2])),
        mk(|p| (p.beta[1], p.beta[2])),
        mk(|p| (p.gamma[1], p.gamma[2])),
    )
}

/// Pullback of the sphere area form by the Gauss map,
/// 2 i d zeta ^ d conj(zeta) / (1 + |zeta|^2)^2, from exact jets.  The
/// normalization is forced by d beta ^ d gamma = alpha * (this form), which
/// pins the factor 2 (expanding the stereographic components gives
/// d beta ^ d gamma = 2 alpha i d zeta ^ d conj(zeta) / (1+|zeta|^2)^2).
pub fn fs_pullback(gauss: &GaussGrid) -> FormField {
    let grid = gauss.grid;
    let du: Vec<Complex64> = gauss.pts.iter().map(|p| p.zeta[1]).collect();
    let dv: Vec<Complex64> = gauss.pts.iter().map(|p| p.zeta[2]).collect();
    let dz = FormField::exact_one_form(grid, du.clone(), dv.clone());
    let dzbar = FormField::exact_one_form(
        grid,
        du.iter().map(|c| c.conj()).collect(),
        dv.iter().map(|c| c.conj()).collect(),
    );
    let weight: Vec<Complex64> = gauss
        .pts
        .iter()
        .map(|p| {
            let d = 1.0 + p.zeta[0].norm_sqr();
            c64(0.0, 2.0) / (d * d)
        })
        .collect();
    dz.wedge(&dzbar).unwrap().mul_scalar(&weight)
}

/// Pluriclosed-obstruction report.
#[derive(Clone, Debug)]
pub struct ObstructionReport {
    /// max |del rho^j| over interior and j = 4..7
    pub del_rho_residual: f64,
    /// residual of sum (d(J0 rho^j))^2 + 4 dbeta^dgamma^w_I + 4 dgamma^dalpha^w_J + 4 dalpha^dbeta^w_K
    pub identity_residual: f64,
    /// max over the three cyclic forms of |d*^d* - component * FS pullback|
    /// where the component magnitude exceeds 0.1
    pub fs_residual: f64,
    /// minimum coefficient of FS ^ Phi ^ omega' over the interior
    pub top_min: f64,
    /// minimum over unramified interior points (energy above threshold)
    pub top_min_unramified: f64,
    /// fraction of interior points counted as ramified
    pub ramified_fraction: f64,
}

/// Checks behind the no-pluriclosed-metric argument.
pub fn pluriclosed_obstruction(
    gauss: &GaussGrid,
    acs: &AcsField,
    omega_prime: &FormField,
) -> Result<ObstructionReport> {
    let grid = gauss.grid;
    let npts = grid.npts();
    // positivity precondition on omega'
    let min_eig = positivity_min_eig(omega_prime, acs, &vec![false; npts]);
    if min_eig <= 0.0 {
        return Err(KernelError::Domain(format!(
            "test form is not positive (min metric eigenvalue {min_eig:.3e})"
        )));
    }
    let (da, db, dg) = gauss_exact_one_forms(gauss);
    let quats = [mat_i(), mat_j(), mat_k()];

    // d(J0 rho^j) = d(J0 e^j): entries of the J row are linear in the Gauss
    // components, so the derivative is exact
    let mut identity_lhs = FormField::zero(grid, 4);
    let mut del_rho: f64 = 0.0;
    for l in 2..6usize {
        // J0 e^{l+2} = sum_k M[l][k] e^{k+2}, M = alpha I + beta J + gamma K
        let mut dje = FormField::zero(grid, 2);
        for k in 2..6usize {
            let coeff_form = da
                .scale(c64(quats[0][(l - 2, k - 2)], 0.0))
                .add(&db.scale(c64(quats[1][(l - 2, k - 2)], 0.0)))?
                .add(&dg.scale(c64(quats[2][(l - 2, k - 2)], 0.0)))?;
            dje = dje.add(&coeff_form.wedge(&crate::forms::fiber_form(grid, k + 2))?)?;
        }
        identity_lhs = identity_lhs.add(&dje.wedge(&dje)?)?;
        // del rho^j = (2,0) part of d rho^j = -i (2,0) part of d(J0 e^j)
        let p20 = dje.type_project(2, 0, acs)?;
        del_rho = del_rho.max(p20.max_interior_norm());
    }
    let wi = FormField::constant(grid, 2, &omega_coeffs(Quat::I));
    let wj = FormField::constant(grid, 2, &omega_coeffs(Quat::J));
    let wk = FormField::constant(grid, 2, &omega_coeffs(Quat::K));
    let rhs = db
        .wedge(&dg)?
        .wedge(&wi)?
        .add(&dg.wedge(&da)?.wedge(&wj)?)?
        .add(&da.wedge(&db)?.wedge(&wk)?)?
        .scale(c64(-4.0, 0.0));
    let identity_residual = identity_lhs.sub(&rhs)?.max_interior_norm();

    // dbeta^dgamma = alpha G* w_FS and cyclic, where the component exceeds 0.1
    let fs = fs_pullback(gauss);
    let mut fs_residual: f64 = 0.0;
    let combos: [(&FormField, &FormField, fn(&crate::weierstrass::GaussPoint) -> f64); 3] = [
        (&db, &dg, |p| p.alpha[0]),
        (&dg, &da, |p| p.beta[0]),
        (&da, &db, |p| p.gamma[0]),
    ];
    for (x, y, comp) in combos {
        let lhs = x.wedge(y)?;
        let scaled: Vec<Complex64> = gauss.pts.iter().map(|p| c64(comp(p), 0.0)).collect();
        let diff = lhs.sub(&fs.mul_scalar(&scaled))?;
        let r = diff.max_masked_norm(|i| comp(&gauss.pts[i]).abs() > 0.1);
        fs_residual = fs_residual.max(r);
    }

    // top form G*w ^ Phi ^ omega'
    let top = fs.wedge(&fiber_combination_field(gauss))?.wedge(omega_prime)?;
    let plane = top.plane(0);
    let thresh = 1e-6 * gauss.dg2_max;
    let mut top_min = f64::INFINITY;
    let mut top_min_unram = f64::INFINITY;
    let mut ramified = 0usize;
    let mut interior = 0usize;
    for i in 0..npts {
        if !grid.is_interior(i) {
            continue;
        }
        interior += 1;
        top_min = top_min.min(plane[i].re);
        if gauss.pts[i].dg2[0] > thresh {
            top_min_unram = top_min_unram.min(plane[i].re);
        } else {
            ramified += 1;
        }
    }
    Ok(ObstructionReport {
        del_rho_residual: del_rho,
        identity_residual,
        fs_residual,
        top_min,
        top_min_unramified: top_min_unram,
        ramified_fraction: ramified as f64 / interior.max(1) as f64,
    })
}
