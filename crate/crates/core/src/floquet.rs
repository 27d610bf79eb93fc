//! Floquet operator of the kicked top, its spectral decomposition and
//! Heisenberg evolution of the observable in the eigenbasis.
//!
//! Eigendecompositions only ever use Hermitian solvers: a unitary `U` is
//! diagonalized through the commuting pair `(U + U^dag)/2`, `(U - U^dag)/2i`,
//! which keeps the eigenvector matrix unitary to roundoff even for
//! quasi-degenerate doublets.

use std::io::{Read, Write};

use faer::{c64, Mat, MatRef, Side};

use crate::error::{Error, Result};
use crate::spin::{sx_real, Spin, SpinOperators, StateVector};

/// Quasienergies closer than this are flagged as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;
/// Pencil eigenvalues closer than this are re-split with the conjugate pencil.
const CLUSTER_TOL: f64 = 1e-5;
/// Pencil angle: eigenvalues of `cos d H1 + sin d H2` are `cos(eps - d)`.
const PENCIL_ANGLE: f64 = 0.618_033_988_749_894_8;

/// Observable `A` of the OTOC, scaled by `1/S`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Observable {
    #[default]
    Sx,
    Sy,
}

impl Observable {
    pub fn matrix<'a>(&self, ops: &'a SpinOperators) -> &'a Mat<c64> {
        match self {
            Observable::Sx => &ops.sx,
            Observable::Sy => &ops.sy,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Observable::Sx => "sx",
            Observable::Sy => "sy",
        }
    }
}

impl std::str::FromStr for Observable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sx" => Ok(Observable::Sx),
            "sy" => Ok(Observable::Sy),
            other => Err(Error::InvalidArgument(format!("unknown observable {other:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct UnitaryMatrix(pub Mat<c64>);

impl UnitaryMatrix {
    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_ref(&self) -> MatRef<'_, c64> {
        self.0.as_ref()
    }

    /// `max |U^dag U - I|`
    pub fn unitarity_error(&self) -> f64 {
        let prod = self.0.adjoint() * &self.0;
        max_dev_from_identity(prod.as_ref())
    }
}

pub(crate) fn max_dev_from_identity(m: MatRef<'_, c64>) -> f64 {
    let mut worst: f64 = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((m[(i, j)] - c64::new(target, 0.0)).norm());
        }
    }
    worst
}

fn eig_err(e: impl std::fmt::Debug) -> Error {
    Error::Eigensolver(format!("{e:?}"))
}

/// `exp(-i theta S_x)` from the real eigendecomposition of `S_x`.
fn x_rotation(spin: Spin, theta: f64) -> Result<Mat<c64>> {
    let sx = sx_real(spin);
    let evd = sx.self_adjoint_eigen(Side::Lower).map_err(eig_err)?;
    let u = evd.U();
    let lambda = evd.S().column_vector();
    let dim = spin.dim();
    let phases: Vec<c64> = (0..dim)
        .map(|j| {
            let (s, c) = (-theta * lambda[j]).sin_cos();
            c64::new(c, s)
        })
        .collect();
    Ok(Mat::<c64>::from_fn(dim, dim, |a, b| {
        let mut acc = c64::new(0.0, 0.0);
        for j in 0..dim {
            acc += phases[j] * (u[(a, j)] * u[(b, j)]);
        }
        acc
    }))
}

/// Phases `exp(-i kappa m^2 / 2S)` of the kick on the `S_z` basis.
fn kick_phases(spin: Spin, kappa: f64) -> Vec<c64> {
    let s = spin.value();
    (0..spin.dim())
        .map(|i| {
            let m = spin.m(i);
            let (sn, cs) = (-kappa * m * m / (2.0 * s)).sin_cos();
            c64::new(cs, sn)
        })
        .collect()
}

/// `F = exp[-i (kappa/2S) S_z^2] exp(-i alpha S_x)`.
pub fn build_floquet(spin: Spin, alpha: f64, kappa: f64) -> Result<UnitaryMatrix> {
    let rot = x_rotation(spin, alpha)?;
    let kick = kick_phases(spin, kappa);
    let dim = spin.dim();
    Ok(UnitaryMatrix(Mat::<c64>::from_fn(dim, dim, |i, j| kick[i] * rot[(i, j)])))
}

#[derive(Clone, Debug)]
pub struct FloquetSpectrum {
    pub spin: Spin,
    pub observable_kind: Observable,
    /// `eps_k` in `(-pi, pi]`, ascending.
    pub quasienergies: Vec<f64>,
    /// Column `k` is `|eps_k>` in the `S_z` basis.
    pub eigenvectors: Mat<c64>,
    /// `<eps_a|A|eps_b> / S`.
    pub observable: Mat<c64>,
    observable_real: Option<Mat<f64>>,
    /// Adjacent index pairs (cyclically) closer than [`DEGENERACY_TOL`].
    pub degeneracies: Vec<(usize, usize)>,
}

impl FloquetSpectrum {
    /// Assembles a spectrum from eigenpairs (sorted here) and conjugates the
    /// observable into the eigenbasis.
    pub fn from_parts(spin: Spin, quasienergies: Vec<f64>, eigenvectors: Mat<c64>, observable: Observable) -> Result<Self> {
        let dim = spin.dim();
        if quasienergies.len() != dim || eigenvectors.nrows() != dim || eigenvectors.ncols() != dim {
            return Err(Error::LengthMismatch(quasienergies.len(), dim));
        }
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| quasienergies[a].total_cmp(&quasienergies[b]));
        let eps: Vec<f64> = order.iter().map(|&k| quasienergies[k]).collect();
        let vecs = Mat::<c64>::from_fn(dim, dim, |i, k| eigenvectors[(i, order[k])]);

        let ops = SpinOperators::new(spin);
        let a = observable.matrix(&ops);
        let scale = 1.0 / spin.value();
        let conj = vecs.adjoint() * (a * &vecs);
        // exact Hermitian symmetrization
        let obs = Mat::<c64>::from_fn(dim, dim, |i, j| (conj[(i, j)] + conj[(j, i)].conj()) * (0.5 * scale));
        let mut max_im: f64 = 0.0;
        for j in 0..dim {
            for i in 0..dim {
                max_im = max_im.max(obs[(i, j)].im.abs());
            }
        }
        let observable_real = (max_im < 1e-12).then(|| Mat::<f64>::from_fn(dim, dim, |i, j| obs[(i, j)].re));

        let mut degeneracies = Vec::new();
        for k in 0..dim {
            let next = (k + 1) % dim;
            let mut gap = eps[next] - eps[k];
            if next == 0 {
                gap += 2.0 * std::f64::consts::PI;
            }
            if dim > 1 && gap.abs() < DEGENERACY_TOL {
                degeneracies.push((k, next));
            }
        }
        if !degeneracies.is_empty() {
            log::warn!(
                "{} quasienergy pair(s) closer than {DEGENERACY_TOL:e}; long-time formula assumptions violated",
                degeneracies.len()
            );
        }
        Ok(Self {
            spin,
            observable_kind: observable,
            quasienergies: eps,
            eigenvectors: vecs,
            observable: obs,
            observable_real,
            degeneracies,
        })
    }

    pub fn dim(&self) -> usize {
        self.quasienergies.len()
    }

    /// The observable as a real matrix, when the eigenvector gauge makes it real.
    pub fn observable_real(&self) -> Option<&Mat<f64>> {
        self.observable_real.as_ref()
    }

    pub fn is_degenerate(&self, k: usize) -> bool {
        self.degeneracies.iter().any(|&(a, b)| a == k || b == k)
    }

    /// Smallest cyclic gap between adjacent quasienergies.
    pub fn min_gap(&self) -> f64 {
        let n = self.dim();
        (0..n)
            .map(|k| {
                let next = (k + 1) % n;
                let g = self.quasienergies[next] - self.quasienergies[k];
                if next == 0 {
                    g + 2.0 * std::f64::consts::PI
                } else {
                    g
                }
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn eigenstate(&self, k: usize) -> StateVector {
        StateVector::new((0..self.dim()).map(|i| self.eigenvectors[(i, k)]).collect())
    }

    /// Components `<eps_a|psi>`.
    pub fn to_eigenbasis(&self, psi: &StateVector) -> Vec<c64> {
        let v = &self.eigenvectors;
        (0..self.dim())
            .map(|a| {
                psi.amplitudes()
                    .iter()
                    .enumerate()
                    .map(|(i, x)| v[(i, a)].conj() * x)
                    .sum()
            })
            .collect()
    }

    /// `e^{-i eps_a t}` for every eigenstate.
    pub fn phases(&self, t: u32) -> Vec<c64> {
        self.quasienergies
            .iter()
            .map(|&e| {
                let (s, c) = (-e * f64::from(t)).sin_cos();
                c64::new(c, s)
            })
            .collect()
    }

    /// `(A(t))_{ab} = e^{-i(eps_a - eps_b)t} A_{ab}` with `A(t) = F^{dag t} A F^t / S`.
    pub fn heisenberg(&self, t: u32) -> Mat<c64> {
        let ph = self.phases(t);
        let n = self.dim();
        Mat::<c64>::from_fn(n, n, |a, b| ph[a] * ph[b].conj() * self.observable[(a, b)])
    }

    /// `sum_k e^{i eps_k} |eps_k><eps_k|` in the `S_z` basis.
    pub fn reconstruct(&self) -> Mat<c64> {
        let n = self.dim();
        let v = &self.eigenvectors;
        let scaled = Mat::<c64>::from_fn(n, n, |i, k| {
            let (s, c) = self.quasienergies[k].sin_cos();
            v[(i, k)] * c64::new(c, s)
        });
        &scaled * v.adjoint()
    }

    /// Raw eigenvector dump: row-major `(re, im)` f64 pairs, little-endian.
    pub fn write_eigenvectors(&self, mut w: impl Write) -> Result<()> {
        let n = self.dim();
        let mut buf = Vec::with_capacity(n * n * 16);
        for i in 0..n {
            for k in 0..n {
                let z = self.eigenvectors[(i, k)];
                buf.extend_from_slice(&z.re.to_le_bytes());
                buf.extend_from_slice(&z.im.to_le_bytes());
            }
        }
        w.write_all(&buf)?;
        Ok(())
    }
}

/// Reads a dump written by [`FloquetSpectrum::write_eigenvectors`].
pub fn read_eigenvectors(mut r: impl Read, dim: usize) -> Result<Mat<c64>> {
    let mut buf = Vec::new();
    r.read_to_end(&mut buf)?;
    if buf.len() != dim * dim * 16 {
        return Err(Error::MalformedDump(format!(
            "expected {} bytes for dim {dim}, found {}",
            dim * dim * 16,
            buf.len()
        )));
    }
    let f = |off: usize| f64::from_le_bytes(buf[off..off + 8].try_into().expect("8 bytes"));
    Ok(Mat::<c64>::from_fn(dim, dim, |i, k| {
        let off = (i * dim + k) * 16;
        c64::new(f(off), f(off + 8))
    }))
}

/// Groups ascending eigenvalues into runs separated by less than `tol`.
fn clusters(values: &[f64], tol: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i] - values[i - 1] >= tol {
            if i - start > 1 {
                out.push(start..i);
            }
            start = i;
        }
    }
    out
}

/// Eigendecomposition of an arbitrary unitary via its Hermitian pencil.
pub fn floquet_spectrum(f: &UnitaryMatrix, spin: Spin, observable: Observable) -> Result<FloquetSpectrum> {
    let n = f.dim();
    if n != spin.dim() {
        return Err(Error::LengthMismatch(n, spin.dim()));
    }
    let u = &f.0;
    let half = c64::new(0.5, 0.0);
    let h1 = Mat::<c64>::from_fn(n, n, |i, j| (u[(i, j)] + u[(j, i)].conj()) * half);
    // (U - U^dag) / 2i
    let h2 = Mat::<c64>::from_fn(n, n, |i, j| (u[(i, j)] - u[(j, i)].conj()) * c64::new(0.0, -0.5));
    let (sd, cd) = PENCIL_ANGLE.sin_cos();
    let pencil = Mat::<c64>::from_fn(n, n, |i, j| h1[(i, j)] * cd + h2[(i, j)] * sd);
    let evd = pencil.self_adjoint_eigen(Side::Lower).map_err(eig_err)?;
    let mut vecs = evd.U().to_owned();
    let lambda: Vec<f64> = evd.S().column_vector().iter().map(|z| z.re).collect();

    for range in clusters(&lambda, CLUSTER_TOL) {
        let m = range.len();
        let vc = vecs.subcols(range.start, m).to_owned();
        let conj_pencil = Mat::<c64>::from_fn(n, n, |i, j| h2[(i, j)] * cd - h1[(i, j)] * sd);
        let block = vc.adjoint() * (&conj_pencil * &vc);
        let block = Mat::<c64>::from_fn(m, m, |i, j| (block[(i, j)] + block[(j, i)].conj()) * half);
        let sub = block.self_adjoint_eigen(Side::Lower).map_err(eig_err)?;
        let rotated = &vc * sub.U();
        vecs.subcols_mut(range.start, m).copy_from(&rotated);
    }

    let fv = u * &vecs;
    let eps: Vec<f64> = (0..n)
        .map(|k| {
            let mut z = c64::new(0.0, 0.0);
            for i in 0..n {
                z += vecs[(i, k)].conj() * fv[(i, k)];
            }
            wrap_quasienergy(z.im.atan2(z.re))
        })
        .collect();
    FloquetSpectrum::from_parts(spin, eps, vecs, observable)
}

/// Maps an angle into `(-pi, pi]`.
pub fn wrap_quasienergy(e: f64) -> f64 {
    use std::f64::consts::PI;
    let mut x = e.rem_euclid(2.0 * PI);
    if x > PI {
        x -= 2.0 * PI;
    }
    x
}

/// Kicked-top spectrum through the symmetrized Floquet operator
/// `F_s = e^{-i alpha S_x/2} e^{-i kappa S_z^2/2S} e^{-i alpha S_x/2}`.
///
/// `F_s` is complex symmetric and unitary, so its real and imaginary parts
/// are commuting real symmetric matrices with a common real eigenbasis `W`.
/// The eigenvectors of `F` are `e^{i alpha S_x/2} W`, in which gauge the
/// `S_x` matrix elements are real.
pub fn kicked_top_spectrum(spin: Spin, alpha: f64, kappa: f64, observable: Observable) -> Result<FloquetSpectrum> {
    let n = spin.dim();
    let half_rot = x_rotation(spin, 0.5 * alpha)?;
    let kick = kick_phases(spin, kappa);
    let kicked = Mat::<c64>::from_fn(n, n, |i, j| kick[i] * half_rot[(i, j)]);
    let fs = &half_rot * &kicked;
    let re = Mat::<f64>::from_fn(n, n, |i, j| 0.5 * (fs[(i, j)].re + fs[(j, i)].re));
    let im = Mat::<f64>::from_fn(n, n, |i, j| 0.5 * (fs[(i, j)].im + fs[(j, i)].im));
    let (sd, cd) = PENCIL_ANGLE.sin_cos();
    let pencil = Mat::<f64>::from_fn(n, n, |i, j| cd * re[(i, j)] + sd * im[(i, j)]);
    let evd = pencil.self_adjoint_eigen(Side::Lower).map_err(eig_err)?;
    let mut w = evd.U().to_owned();
    let lambda: Vec<f64> = evd.S().column_vector().iter().copied().collect();

    for range in clusters(&lambda, CLUSTER_TOL) {
        let m = range.len();
        let wc = w.subcols(range.start, m).to_owned();
        let conj_pencil = Mat::<f64>::from_fn(n, n, |i, j| cd * im[(i, j)] - sd * re[(i, j)]);
        let block = wc.transpose() * (&conj_pencil * &wc);
        let block = Mat::<f64>::from_fn(m, m, |i, j| 0.5 * (block[(i, j)] + block[(j, i)]));
        let sub = block.self_adjoint_eigen(Side::Lower).map_err(eig_err)?;
        let rotated = &wc * sub.U();
        w.subcols_mut(range.start, m).copy_from(&rotated);
    }

    let rw = &re * &w;
    let iw = &im * &w;
    let eps: Vec<f64> = (0..n)
        .map(|k| {
            let (mut c, mut s) = (0.0, 0.0);
            for i in 0..n {
                c += w[(i, k)] * rw[(i, k)];
                s += w[(i, k)] * iw[(i, k)];
            }
            wrap_quasienergy(s.atan2(c))
        })
        .collect();
    // e^{+i alpha S_x/2} = conj(e^{-i alpha S_x/2}) since S_x is real
    let wc = Mat::<c64>::from_fn(n, n, |i, k| c64::new(w[(i, k)], 0.0));
    let back = Mat::<c64>::from_fn(n, n, |i, j| half_rot[(i, j)].conj());
    let vecs = &back * &wc;
    FloquetSpectrum::from_parts(spin, eps, vecs, observable)
}
