use std::io::Write;
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::models::Network;
use crate::nn::Scalar;
use crate::tokenizer::Vocabulary;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Projection {
    Pca,
    None,
}

impl FromStr for Projection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pca" => Ok(Projection::Pca),
            "none" => Ok(Projection::None),
            _ => Err(Error::Lookup(format!("unknown projection {s:?} (pca|none)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingRow {
    pub id: u32,
    pub token: String,
    pub is_home: bool,
    pub action_type: String,
    pub bx: u8,
    pub by: u8,
    pub values: Vec<f64>,
    pub projected: [f64; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    pub dim: usize,
    pub rows: Vec<EmbeddingRow>,
}

/// Centered principal components of a row-major `n x d` matrix.
#[derive(Debug, Clone)]
pub struct Pca {
    pub mean: Vec<f64>,
    /// Unit eigenvectors of the scatter matrix, by decreasing eigenvalue.
    pub components: Vec<Vec<f64>>,
    /// Eigenvalues of the centered scatter matrix `XᵀX`, decreasing.
    pub eigenvalues: Vec<f64>,
}

impl Pca {
    /// Coordinates of `row` on the first `m` components.
    pub fn project(&self, row: &[f64], m: usize) -> Vec<f64> {
        self.components[..m]
            .iter()
            .map(|c| c.iter().zip(row).zip(&self.mean).map(|((c, x), mu)| c * (x - mu)).sum())
            .collect()
    }
}

pub fn pca(matrix: &[f64], n: usize, d: usize) -> Result<Pca> {
    if matrix.len() != n * d || n == 0 || d == 0 {
        return Err(Error::shape("pca", &[matrix.len()], &[n, d]));
    }
    let mut mean = vec![0.0; d];
    for row in matrix.chunks(d) {
        for (m, x) in mean.iter_mut().zip(row) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    let centered = DMatrix::from_fn(n, d, |i, j| matrix[i * d + j] - mean[j]);
    let scatter = centered.transpose() * &centered;
    let eig = SymmetricEigen::new(scatter);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let mut components = Vec::with_capacity(d);
    let mut eigenvalues = Vec::with_capacity(d);
    for &j in &order {
        let mut v: Vec<f64> = eig.eigenvectors.column(j).iter().copied().collect();
        // sign convention: largest-magnitude entry positive
        let pivot = v
            .iter()
            .copied()
            .fold(0.0f64, |a, x| if x.abs() > a.abs() { x } else { a });
        if pivot < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        components.push(v);
        eigenvalues.push(eig.eigenvalues[j].max(0.0));
    }
    Ok(Pca {
        mean,
        components,
        eigenvalues,
    })
}

/// Builds the table from a raw `V x d` embedding matrix.
pub fn embedding_table(matrix: &[f64], d: usize, vocab: &Vocabulary, projection: Projection) -> Result<EmbeddingTable> {
    let v = vocab.len();
    if matrix.len() != v * d {
        return Err(Error::shape("embedding_table", &[matrix.len()], &[v, d]));
    }
    let fit = match projection {
        Projection::Pca => Some(pca(matrix, v, d)?),
        Projection::None => None,
    };
    let mut rows = Vec::with_capacity(v);
    for (id, values) in matrix.chunks(d).enumerate() {
        let t = vocab.id_to_token(id as u32)?;
        let projected = match &fit {
            Some(p) if d >= 2 => {
                let c = p.project(values, 2);
                [c[0], c[1]]
            }
            Some(p) => [p.project(values, 1)[0], 0.0],
            None => [0.0, 0.0],
        };
        rows.push(EmbeddingRow {
            id: id as u32,
            token: t.to_string(),
            is_home: t.is_home,
            action_type: t.action_type.to_string(),
            bx: t.bin.bx,
            by: t.bin.by,
            values: values.to_vec(),
            projected,
        });
    }
    Ok(EmbeddingTable { dim: d, rows })
}

pub fn export_embeddings<T: Scalar>(
    net: &Network<T>,
    vocab: &Vocabulary,
    projection: Projection,
) -> Result<EmbeddingTable> {
    let e = net.embeddings();
    let d = e.last_dim();
    embedding_table(&e.to_f64(), d, vocab, projection)
}

pub fn embedding_csv_header(d: usize) -> String {
    let mut h = String::from("id,token,is_home,action_type,bx,by");
    for i in 0..d {
        h.push_str(&format!(",e{i}"));
    }
    h.push_str(",p0,p1");
    h
}

pub fn write_embeddings_csv<W: Write>(mut w: W, table: &EmbeddingTable) -> std::io::Result<()> {
    writeln!(w, "{}", embedding_csv_header(table.dim))?;
    for r in &table.rows {
        write!(
            w,
            "{},\"{}\",{},{},{},{}",
            r.id, r.token, r.is_home, r.action_type, r.bx, r.by
        )?;
        for v in &r.values {
            write!(w, ",{v}")?;
        }
        writeln!(w, ",{},{}", r.projected[0], r.projected[1])?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dist(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
    }

    #[test]
    fn planar_rows_keep_pairwise_distances() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let d = 50;
        let n = 40;
        // two orthonormal directions plus an offset
        let mut u: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let nu = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        u.iter_mut().for_each(|x| *x /= nu);
        let mut w: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let proj: f64 = w.iter().zip(&u).map(|(a, b)| a * b).sum();
        w.iter_mut().zip(&u).for_each(|(x, ui)| *x -= proj * ui);
        let nw = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        w.iter_mut().for_each(|x| *x /= nw);
        let offset: Vec<f64> = (0..d).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let mut m = Vec::new();
        for _ in 0..n {
            let (a, b) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            m.extend((0..d).map(|j| offset[j] + a * u[j] + b * w[j]));
        }
        let p = pca(&m, n, d).unwrap();
        let coords: Vec<Vec<f64>> = m.chunks(d).map(|r| p.project(r, 2)).collect();
        for i in 0..n {
            for j in 0..n {
                let orig = dist(&m[i * d..(i + 1) * d], &m[j * d..(j + 1) * d]);
                assert!((orig - dist(&coords[i], &coords[j])).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn none_projection_is_zero_and_shape_is_v_by_d() {
        let vocab = Vocabulary::full();
        let d = 3;
        let m: Vec<f64> = (0..vocab.len() * d).map(|i| (i % 7) as f64).collect();
        let t = embedding_table(&m, d, &vocab, Projection::None).unwrap();
        assert_eq!(t.rows.len(), vocab.len());
        assert!(t.rows.iter().all(|r| r.values.len() == d && r.projected == [0.0, 0.0]));
        let mut buf = Vec::new();
        write_embeddings_csv(&mut buf, &t).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "id,token,is_home,action_type,bx,by,e0,e1,e2,p0,p1"
        );
        assert_eq!(lines.count(), vocab.len());
        assert!(embedding_table(&m[1..], d, &vocab, Projection::Pca).is_err());
    }

    /// Top eigenpairs of a symmetric matrix by power iteration with deflation.
    fn power_eigenvalues(mut a: Vec<Vec<f64>>, count: usize) -> Vec<f64> {
        let d = a.len();
        let mut out = Vec::new();
        for _ in 0..count {
            let mut v: Vec<f64> = (0..d).map(|i| 1.0 + i as f64 * 0.01).collect();
            let mut lambda = 0.0;
            for _ in 0..5000 {
                let w: Vec<f64> = a
                    .iter()
                    .map(|row| row.iter().zip(&v).map(|(x, y)| x * y).sum())
                    .collect();
                let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
                lambda = norm;
                v = w.into_iter().map(|x| x / norm).collect();
            }
            for i in 0..d {
                for j in 0..d {
                    a[i][j] -= lambda * v[i] * v[j];
                }
            }
            out.push(lambda);
        }
        out
    }

    #[test]
    fn eigenvalue_mass_matches_power_iteration() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let (n, d) = (30, 6);
        // anisotropic columns so the spectrum is well separated
        let m: Vec<f64> = (0..n * d)
            .map(|k| rng.gen_range(-1.0..1.0) * (1.0 + (k % d) as f64))
            .collect();
        let p = pca(&m, n, d).unwrap();
        let mean: Vec<f64> = (0..d)
            .map(|j| (0..n).map(|i| m[i * d + j]).sum::<f64>() / n as f64)
            .collect();
        let mut scatter = vec![vec![0.0; d]; d];
        let mut trace = 0.0;
        for i in 0..n {
            for a in 0..d {
                let xa = m[i * d + a] - mean[a];
                trace += xa * xa;
                for b in 0..d {
                    scatter[a][b] += xa * (m[i * d + b] - mean[b]);
                }
            }
        }
        let oracle = power_eigenvalues(scatter, 2);
        let total: f64 = p.eigenvalues.iter().sum();
        assert!((total - trace).abs() <= 1e-8 * trace);
        let tail = total - p.eigenvalues[0] - p.eigenvalues[1];
        let oracle_tail = trace - oracle[0] - oracle[1];
        assert!((tail - oracle_tail).abs() <= 1e-8 * trace, "{tail} vs {oracle_tail}");
        for (a, b) in p.eigenvalues.iter().zip(&oracle) {
            assert!((a - b).abs() <= 1e-8 * trace);
        }
    }
}
