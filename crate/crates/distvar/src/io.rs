//! File formats: triples, tuples, colligations, bivariate polynomials, and
//! point clouds as JSON, plus the CSV point-cloud writers. Complex entries
//! are encoded as [re, im] pairs throughout.

use crate::bidisc::{VarietyPoint, VarietySample};
use crate::error::{Error, Result};
use crate::matrix::{C64, Matrix};
use crate::model::{Colligation, ModelTriple, ModelTuple};
use crate::poly::BivariatePoly;
use crate::symm::{SymmPoint, SymmSample};
use serde::{Deserialize, Serialize};

#[derive(Serialize, Deserialize)]
pub struct TripleFile {
    pub dim: usize,
    #[serde(rename = "P")]
    pub p: Vec<Vec<[f64; 2]>>,
    #[serde(rename = "U")]
    pub u: Vec<Vec<[f64; 2]>>,
}

#[derive(Serialize, Deserialize)]
pub struct TupleFile {
    pub dim: usize,
    pub d: usize,
    #[serde(rename = "P_list")]
    pub p_list: Vec<Vec<Vec<[f64; 2]>>>,
    #[serde(rename = "U_list")]
    pub u_list: Vec<Vec<Vec<[f64; 2]>>>,
}

#[derive(Serialize, Deserialize)]
pub struct ColligationFile {
    pub dim_e: usize,
    pub dim_h: usize,
    #[serde(rename = "A")]
    pub a: Vec<Vec<[f64; 2]>>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<[f64; 2]>>,
    #[serde(rename = "C")]
    pub c: Vec<Vec<[f64; 2]>>,
    #[serde(rename = "D")]
    pub d: Vec<Vec<[f64; 2]>>,
}

#[derive(Serialize, Deserialize)]
pub struct BivariatePolyFile {
    pub deg1: usize,
    pub deg2: usize,
    pub coeffs: Vec<Vec<[f64; 2]>>,
}

#[derive(Serialize, Deserialize)]
pub struct PointRecord {
    pub z: [f64; 2],
    pub coords: Vec<[f64; 2]>,
    pub region: String,
}

#[derive(Serialize, Deserialize)]
pub struct PointCloudFile {
    pub points: Vec<PointRecord>,
    pub verdict: String,
}

#[derive(Serialize, Deserialize)]
pub struct SymmRecord {
    pub s: [f64; 2],
    pub p: [f64; 2],
    pub region: String,
}

#[derive(Serialize, Deserialize)]
pub struct SymmCloudFile {
    pub points: Vec<SymmRecord>,
    pub verdict: String,
}

pub fn matrix_to_rows(m: &Matrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn rows_to_matrix(rows: &[Vec<[f64; 2]>], context: &str) -> Result<Matrix> {
    if rows.is_empty() {
        return Err(Error::InvalidInput(format!("{context}: empty matrix")));
    }
    let cols = rows[0].len();
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::InvalidInput(format!("{context}: ragged rows")));
    }
    let mut m = Matrix::zeros(rows.len(), cols);
    for (i, row) in rows.iter().enumerate() {
        for (j, &[re, im]) in row.iter().enumerate() {
            m[(i, j)] = C64::new(re, im);
        }
    }
    if !m.is_finite() {
        return Err(Error::InvalidInput(format!("{context}: non-finite entry")));
    }
    Ok(m)
}

fn expect_square(m: &Matrix, dim: usize, context: &str) -> Result<()> {
    if m.rows() != dim || m.cols() != dim {
        return Err(Error::InvalidInput(format!(
            "{context}: expected {dim} by {dim}, got {} by {}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

pub fn triple_to_json(t: &ModelTriple) -> String {
    let file = TripleFile {
        dim: t.dim,
        p: matrix_to_rows(&t.p),
        u: matrix_to_rows(&t.u),
    };
    serde_json::to_string_pretty(&file).expect("triple serialization cannot fail")
}

pub fn parse_triple(text: &str) -> Result<ModelTriple> {
    let file: TripleFile =
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("triple JSON: {e}")))?;
    let p = rows_to_matrix(&file.p, "P")?;
    let u = rows_to_matrix(&file.u, "U")?;
    expect_square(&p, file.dim, "P")?;
    expect_square(&u, file.dim, "U")?;
    ModelTriple::new(p, u)
}

pub fn tuple_to_json(t: &ModelTuple) -> String {
    let file = TupleFile {
        dim: t.dim,
        d: t.d,
        p_list: t.ps.iter().map(matrix_to_rows).collect(),
        u_list: t.us.iter().map(matrix_to_rows).collect(),
    };
    serde_json::to_string_pretty(&file).expect("tuple serialization cannot fail")
}

pub fn parse_tuple(text: &str) -> Result<ModelTuple> {
    let file: TupleFile =
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("tuple JSON: {e}")))?;
    if file.p_list.len() != file.d || file.u_list.len() != file.d {
        return Err(Error::InvalidInput(format!(
            "tuple JSON: d = {} but {} projections and {} unitaries",
            file.d,
            file.p_list.len(),
            file.u_list.len()
        )));
    }
    let mut ps = Vec::with_capacity(file.d);
    let mut us = Vec::with_capacity(file.d);
    for (i, rows) in file.p_list.iter().enumerate() {
        let m = rows_to_matrix(rows, &format!("P_list[{i}]"))?;
        expect_square(&m, file.dim, &format!("P_list[{i}]"))?;
        ps.push(m);
    }
    for (i, rows) in file.u_list.iter().enumerate() {
        let m = rows_to_matrix(rows, &format!("U_list[{i}]"))?;
        expect_square(&m, file.dim, &format!("U_list[{i}]"))?;
        us.push(m);
    }
    ModelTuple::new(ps, us)
}

pub fn colligation_to_json(c: &Colligation) -> String {
    let file = ColligationFile {
        dim_e: c.dim_e,
        dim_h: c.dim_h,
        a: matrix_to_rows(&c.a),
        b: matrix_to_rows(&c.b),
        c: matrix_to_rows(&c.c),
        d: matrix_to_rows(&c.d),
    };
    serde_json::to_string_pretty(&file).expect("colligation serialization cannot fail")
}

pub fn parse_colligation(text: &str) -> Result<Colligation> {
    let file: ColligationFile = serde_json::from_str(text)
        .map_err(|e| Error::InvalidInput(format!("colligation JSON: {e}")))?;
    let shape = |rows: &[Vec<[f64; 2]>], r: usize, cc: usize, name: &str| -> Result<Matrix> {
        // dim_h = 0 blocks legitimately have zero rows or columns.
        if r == 0 || cc == 0 {
            return Ok(Matrix::zeros(r, cc));
        }
        let m = rows_to_matrix(rows, name)?;
        if m.rows() != r || m.cols() != cc {
            return Err(Error::InvalidInput(format!(
                "{name}: expected {r} by {cc}, got {} by {}",
                m.rows(),
                m.cols()
            )));
        }
        Ok(m)
    };
    let a = shape(&file.a, file.dim_e, file.dim_e, "A")?;
    let b = shape(&file.b, file.dim_e, file.dim_h, "B")?;
    let c = shape(&file.c, file.dim_h, file.dim_e, "C")?;
    let d = shape(&file.d, file.dim_h, file.dim_h, "D")?;
    Colligation::new(a, b, c, d)
}

pub fn poly_to_json(p: &BivariatePoly) -> String {
    let file = BivariatePolyFile {
        deg1: p.deg1(),
        deg2: p.deg2(),
        coeffs: p
            .coeffs
            .iter()
            .map(|row| row.iter().map(|c| [c.re, c.im]).collect())
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("polynomial serialization cannot fail")
}

pub fn parse_poly(text: &str) -> Result<BivariatePoly> {
    let file: BivariatePolyFile = serde_json::from_str(text)
        .map_err(|e| Error::InvalidInput(format!("polynomial JSON: {e}")))?;
    let coeffs: Vec<Vec<C64>> = file
        .coeffs
        .iter()
        .map(|row| row.iter().map(|&[re, im]| C64::new(re, im)).collect())
        .collect();
    let poly = BivariatePoly::new(coeffs)?;
    if poly.deg1() != file.deg1 || poly.deg2() != file.deg2 {
        return Err(Error::InvalidInput(format!(
            "polynomial JSON: declared degrees ({}, {}) but coefficients span ({}, {})",
            file.deg1,
            file.deg2,
            poly.deg1(),
            poly.deg2()
        )));
    }
    Ok(poly)
}

pub fn variety_points_to_cloud(points: &[VarietyPoint], verdict: &str) -> PointCloudFile {
    PointCloudFile {
        points: points
            .iter()
            .map(|pt| PointRecord {
                z: [pt.fiber_param.re, pt.fiber_param.im],
                coords: pt.coords.iter().map(|c| [c.re, c.im]).collect(),
                region: pt.region.label().to_string(),
            })
            .collect(),
        verdict: verdict.to_string(),
    }
}

pub fn cloud_to_json(cloud: &PointCloudFile) -> String {
    serde_json::to_string_pretty(cloud).expect("point cloud serialization cannot fail")
}

/// CSV rows z_re,z_im,z1_re,z1_im,...,region with one header line; the
/// coordinate column count follows the widest point.
pub fn variety_points_to_csv(points: &[VarietyPoint]) -> String {
    let width = points.iter().map(|p| p.coords.len()).max().unwrap_or(2);
    let mut header = String::from("z_re,z_im");
    for k in 1..=width {
        header.push_str(&format!(",z{k}_re,z{k}_im"));
    }
    header.push_str(",region");
    let mut out = header;
    out.push('\n');
    for pt in points {
        out.push_str(&format!("{},{}", pt.fiber_param.re, pt.fiber_param.im));
        for c in &pt.coords {
            out.push_str(&format!(",{},{}", c.re, c.im));
        }
        out.push_str(&format!(",{}\n", pt.region.label()));
    }
    out
}

pub fn symm_points_to_cloud(points: &[SymmPoint], verdict: &str) -> SymmCloudFile {
    SymmCloudFile {
        points: points
            .iter()
            .map(|pt| SymmRecord {
                s: [pt.s.re, pt.s.im],
                p: [pt.p.re, pt.p.im],
                region: pt.region.label().to_string(),
            })
            .collect(),
        verdict: verdict.to_string(),
    }
}

pub fn symm_cloud_to_json(cloud: &SymmCloudFile) -> String {
    serde_json::to_string_pretty(cloud).expect("point cloud serialization cannot fail")
}

/// CSV rows s_re,s_im,p_re,p_im,region.
pub fn symm_points_to_csv(points: &[SymmPoint]) -> String {
    let mut out = String::from("s_re,s_im,p_re,p_im,region\n");
    for pt in points {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            pt.s.re,
            pt.s.im,
            pt.p.re,
            pt.p.im,
            pt.region.label()
        ));
    }
    out
}

pub fn sample_to_cloud(sample: &VarietySample) -> PointCloudFile {
    variety_points_to_cloud(&sample.points, sample.verdict.label())
}

pub fn symm_sample_to_cloud(sample: &SymmSample) -> SymmCloudFile {
    symm_points_to_cloud(&sample.points, sample.verdict.label())
}


#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn triple_json_is_lossless(
            data in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 18)
        ) {
            let block = |off: usize| {
                Matrix::from_fn(3, 3, |i, j| {
                    let (re, im) = data[off + i * 3 + j];
                    C64::new(re, im)
                })
            };
            let t = ModelTriple::new(block(0), block(9)).unwrap();
            let back = parse_triple(&triple_to_json(&t)).unwrap();
            prop_assert!((&back.p - &t.p).fro_norm() == 0.0);
            prop_assert!((&back.u - &t.u).fro_norm() == 0.0);
        }
    }
}
