//! Canonical model triple of a rational inner function via the
//! de Branges-Rovnyak kernel and the lurking isometry, plus a numerical
//! unitary-equivalence test for model triples.
//!
//! The kernel K(z, w) = (I - Psi(z) Psi(w)*) / (1 - z conj(w)) is sampled at
//! seeded nodes; its Gram factorization provides coordinates for the model
//! space H, and the isometry [f; conj(z) g(z)* f] -> [Psi(z)* f; g(z)* f]
//! extends to the unitary of the triple.

use crate::error::{Error, Result};
use crate::inner::RationalInnerFn;
use crate::matrix::{C64, Matrix, ONE};
use crate::model::ModelTriple;
use crate::random::rng_from_seed;
use crate::svd::{nullspace, orthonormal_complement, polar_unitary, rank_from_sigma, svd};
use rand::Rng;

const RANK_TOL: f64 = 1e-8;
const RANK_TOL_HIGH: f64 = 1e-7;
const RANK_TOL_LOW: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct KernelFrame {
    /// Sample nodes in the open disc.
    pub nodes: Vec<C64>,
    /// Orthonormal directions of the coefficient space (the standard basis).
    pub directions: Matrix,
    /// Gram matrix of the frame vectors g(node)* direction.
    pub gram: Matrix,
    /// Numerical rank of the Gram matrix: the model-space dimension.
    pub rank: usize,
    /// Coordinates of the frame vectors in an orthonormal basis of the
    /// model space; column (k, i) holds g(node_k)* e_i.
    pub coord_map: Matrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EquivVerdict {
    Equivalent,
    NotEquivalent,
    Undetermined,
}

impl EquivVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            EquivVerdict::Equivalent => "EQUIVALENT",
            EquivVerdict::NotEquivalent => "NOT_EQUIVALENT",
            EquivVerdict::Undetermined => "UNDETERMINED",
        }
    }
}

/// Nodes on two concentric circles with seeded angular jitter; spread-out
/// nodes keep the Gram matrix well conditioned.
fn sample_nodes(node_count: usize, seed: u64) -> Vec<C64> {
    let mut rng = rng_from_seed(seed);
    let mut nodes = Vec::with_capacity(node_count);
    let per_circle = node_count.div_ceil(2);
    for k in 0..node_count {
        let radius = if k % 2 == 0 { 0.4 } else { 0.7 };
        let slot = (k / 2) as f64;
        let jitter: f64 = rng.random_range(-0.08..0.08);
        let theta = 2.0 * std::f64::consts::PI * slot / per_circle as f64
            + if k % 2 == 0 { 0.0 } else { 0.35 }
            + jitter;
        nodes.push(C64::from_polar(radius, theta));
    }
    nodes
}

/// Samples the de Branges-Rovnyak kernel of psi on a node set and extracts
/// model-space coordinates by factoring the Gram matrix.
pub fn kernel_frame(psi: &RationalInnerFn, node_count: usize, seed: u64) -> Result<KernelFrame> {
    let e = psi.dim_e();
    if node_count < 2 {
        return Err(Error::InvalidInput("need at least two kernel nodes".into()));
    }
    let nodes = sample_nodes(node_count, seed);
    let values: Vec<Matrix> = nodes
        .iter()
        .map(|&z| psi.eval(z))
        .collect::<Result<_>>()?;
    let m = node_count * e;
    let mut gram = Matrix::zeros(m, m);
    for a in 0..node_count {
        for b in 0..node_count {
            let denom = ONE - nodes[a] * nodes[b].conj();
            let block =
                (&Matrix::identity(e) - &(&values[a] * &values[b].adjoint())).scale(denom.inv());
            for i in 0..e {
                for j in 0..e {
                    gram[(a * e + i, b * e + j)] = block[(i, j)];
                }
            }
        }
    }
    let factored = svd(&gram);
    let rank = rank_from_sigma(&factored.sigma, RANK_TOL);
    let rank_high = rank_from_sigma(&factored.sigma, RANK_TOL_HIGH);
    let rank_low = rank_from_sigma(&factored.sigma, RANK_TOL_LOW);
    if rank_high != rank_low {
        return Err(Error::RankDeficiencyUnstable {
            rank_low,
            tol_low: RANK_TOL_LOW,
            rank_high,
            tol_high: RANK_TOL_HIGH,
        });
    }
    // gram = V S V* for the Hermitian positive part, so sqrt(S) V* gives
    // coordinates with X* X = gram.
    let mut coord_map = Matrix::zeros(rank, m);
    for r in 0..rank {
        let root = factored.sigma[r].sqrt();
        for c in 0..m {
            coord_map[(r, c)] = factored.v[(c, r)].conj() * root;
        }
    }
    Ok(KernelFrame {
        nodes,
        directions: Matrix::identity(e),
        gram,
        rank,
        coord_map,
    })
}

/// Stacks the domain and range families of the lurking isometry in
/// E + H coordinates: columns [e_i; conj(z) x] and [Psi(z)* e_i; x].
fn isometry_stacks(psi: &RationalInnerFn, frame: &KernelFrame) -> Result<(Matrix, Matrix)> {
    let e = psi.dim_e();
    let r = frame.rank;
    let m = frame.nodes.len() * e;
    let n = e + r;
    let mut domain = Matrix::zeros(n, m);
    let mut range = Matrix::zeros(n, m);
    for (k, &z) in frame.nodes.iter().enumerate() {
        let psi_star = psi.eval(z)?.adjoint();
        for i in 0..e {
            let col = k * e + i;
            domain[(i, col)] = ONE;
            for row in 0..e {
                range[(row, col)] = psi_star[(row, i)];
            }
            for row in 0..r {
                let x = frame.coord_map[(row, col)];
                domain[(e + row, col)] = z.conj() * x;
                range[(e + row, col)] = x;
            }
        }
    }
    Ok((domain, range))
}

/// The canonical model triple of a rational inner function: projection onto
/// the coefficient summand and a unitary extension of the lurking isometry.
/// Any extension qualifies; this one aligns the two orthocomplements in
/// index order.
pub fn canonical_triple(
    psi: &RationalInnerFn,
    node_count: usize,
    seed: u64,
    tol: f64,
) -> Result<ModelTriple> {
    let e = psi.dim_e();
    if node_count < 2 * e + 2 {
        return Err(Error::InvalidInput(format!(
            "node_count {node_count} too small for coefficient dimension {e}"
        )));
    }
    let frame = kernel_frame(psi, node_count, seed)?;
    let r = frame.rank;
    let n = e + r;
    let (domain, range) = isometry_stacks(psi, &frame)?;
    let dsvd = svd(&domain);
    let d_rank = rank_from_sigma(&dsvd.sigma, RANK_TOL);
    let r_rank = rank(&range);
    if d_rank != r_rank {
        return Err(Error::DefectMismatch {
            domain: n - d_rank,
            range: n - r_rank,
        });
    }
    // Orthonormal basis of the domain span and its image under the
    // isometry: u_k = domain v_k / sigma_k maps to range v_k / sigma_k.
    let d_basis = dsvd.u.slice(0, n, 0, d_rank);
    let mut image = Matrix::zeros(n, d_rank);
    for k in 0..d_rank {
        let inv = 1.0 / dsvd.sigma[k];
        for row in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for c in 0..domain.cols() {
                acc += range[(row, c)] * dsvd.v[(c, k)];
            }
            image[(row, k)] = acc.scale(inv);
        }
    }
    let image_defect = (&(&image.adjoint() * &image) - &Matrix::identity(d_rank)).fro_norm();
    if image_defect > 1e-6 {
        return Err(Error::NotUnitary {
            defect: image_defect,
        });
    }
    let d_complement = orthonormal_complement(&d_basis);
    let r_complement = orthonormal_complement(&image);
    let u_dag = &(&image * &d_basis.adjoint()) + &(&r_complement * &d_complement.adjoint());
    let mut p = Matrix::zeros(n, n);
    for i in 0..e {
        p[(i, i)] = ONE;
    }
    let triple = ModelTriple::new(p, u_dag)?;
    let report = triple.validate(tol.max(1e-8));
    if !report.ok() {
        let defect = report.worst().map(|c| c.defect).unwrap_or(f64::NAN);
        return Err(Error::NotUnitary { defect });
    }
    Ok(triple)
}

fn rank(a: &Matrix) -> usize {
    rank_from_sigma(&svd(a).sigma, RANK_TOL)
}

/// A sensible node count for the canonical construction: twice the ambient
/// colligation dimension plus slack.
pub fn default_node_count(psi: &RationalInnerFn) -> usize {
    2 * (psi.dim_e() + psi.colligation.dim_h) + 4
}

/// Decides unitary equivalence of two model triples by computing the kernel
/// of X -> (P2 X - X P1, U2 X - X U1) and polar-correcting a generic kernel
/// element. An empty kernel certifies NOT_EQUIVALENT; a kernel with no
/// unitary element found leaves UNDETERMINED.
pub fn unitary_equivalence(
    t1: &ModelTriple,
    t2: &ModelTriple,
    seed: u64,
    tol: f64,
) -> (EquivVerdict, Option<Matrix>) {
    if t1.dim != t2.dim {
        return (EquivVerdict::NotEquivalent, None);
    }
    let n = t1.dim;
    let mut op = Matrix::zeros(2 * n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            let row_p = i * n + j;
            let row_u = n * n + i * n + j;
            for k in 0..n {
                for l in 0..n {
                    let col = k * n + l;
                    let mut vp = C64::new(0.0, 0.0);
                    let mut vu = C64::new(0.0, 0.0);
                    if j == l {
                        vp += t2.p[(i, k)];
                        vu += t2.u[(i, k)];
                    }
                    if i == k {
                        vp -= t1.p[(l, j)];
                        vu -= t1.u[(l, j)];
                    }
                    op[(row_p, col)] = vp;
                    op[(row_u, col)] = vu;
                }
            }
        }
    }
    let kernel = nullspace(&op, 1e-8);
    if kernel.cols() == 0 {
        return (EquivVerdict::NotEquivalent, None);
    }
    let mut rng = rng_from_seed(seed);
    for _ in 0..8 {
        let mut candidate = Matrix::zeros(n, n);
        for col in 0..kernel.cols() {
            let weight = C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            for i in 0..n {
                for j in 0..n {
                    candidate[(i, j)] += kernel[(i * n + j, col)] * weight;
                }
            }
        }
        let Ok(w) = polar_unitary(&candidate) else {
            continue;
        };
        if w.unitarity_defect() > 1e-8 {
            continue;
        }
        let p_defect = (&(&t2.p * &w) - &(&w * &t1.p)).fro_norm();
        let u_defect = (&(&t2.u * &w) - &(&w * &t1.u)).fro_norm();
        if p_defect <= tol && u_defect <= tol {
            return (EquivVerdict::Equivalent, Some(w));
        }
    }
    (EquivVerdict::Undetermined, None)
}
