//! Smooth nonconvex binary classification, `f(z) = ½ ‖𝟏 − tanh(b ⊙ Aᵀz)‖²`.

use std::io::Read;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dense::DenseMatrix;
use crate::error::{check_dim, Error, Result};
use crate::trust_region::Objective;

/// Cluster separation for [`ClassificationProblem::synthetic`]. The clusters
/// overlap, so the loss stays bounded away from zero.
pub const DEFAULT_SEPARATION: f64 = 2.0;

/// Samples are the columns of the `n × N` matrix `A`; labels are ±1.
#[derive(Clone, Debug)]
pub struct ClassificationProblem {
    a: DenseMatrix<f64>,
    b: Vec<f64>,
}

impl ClassificationProblem {
    pub fn new(a: DenseMatrix<f64>, b: Vec<f64>) -> Result<Self> {
        check_dim(a.cols(), b.len())?;
        if b.iter().any(|&v| v != 1.0 && v != -1.0) {
            return Err(Error::InvalidArgument("labels must be ±1".into()));
        }
        Ok(Self { a, b })
    }

    /// Features `n`.
    pub fn n(&self) -> usize {
        self.a.rows()
    }

    /// Samples `N`.
    pub fn samples(&self) -> usize {
        self.a.cols()
    }

    pub fn data(&self) -> &DenseMatrix<f64> {
        &self.a
    }

    pub fn labels(&self) -> &[f64] {
        &self.b
    }

    /// `t = tanh(b ⊙ Aᵀz)`
    fn activations(&self, z: &[f64]) -> Vec<f64> {
        self.a
            .tmatvec(z)
            .iter()
            .zip(&self.b)
            .map(|(m, b)| (b * m).tanh())
            .collect()
    }

    pub fn value(&self, z: &[f64]) -> Result<f64> {
        check_dim(self.n(), z.len())?;
        Ok(0.5
            * self
                .activations(z)
                .iter()
                .map(|t| (1.0 - t).powi(2))
                .sum::<f64>())
    }

    /// `−A [b ⊙ (1 − t²) ⊙ (1 − t)]`
    pub fn gradient(&self, z: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.n(), z.len())?;
        let w: Vec<f64> = self
            .activations(z)
            .iter()
            .zip(&self.b)
            .map(|(t, b)| -b * (1.0 - t * t) * (1.0 - t))
            .collect();
        Ok(self.a.matvec(&w))
    }

    /// `A (h ⊙ Aᵀv)` with `h = (1 − t²)(1 − t)(1 + 3t)`.
    pub fn hvp(&self, z: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.n(), z.len())?;
        check_dim(self.n(), v.len())?;
        let av = self.a.tmatvec(v);
        let w: Vec<f64> = self
            .activations(z)
            .iter()
            .zip(&av)
            .map(|(t, x)| (1.0 - t * t) * (1.0 - t) * (1.0 + 3.0 * t) * x)
            .collect();
        Ok(self.a.matvec(&w))
    }

    /// Two Gaussian clusters at `±μ`, `‖μ‖ ≈ separation`, with unit-variance noise.
    pub fn synthetic(n: usize, samples: usize, separation: f64, seed: u64) -> Result<Self> {
        if n == 0 || samples == 0 {
            return Err(Error::InvalidArgument("empty dataset".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut gauss = || -> f64 { StandardNormal.sample(&mut rng) };
        let scale = 1.0 / (n as f64).sqrt();
        let mu: Vec<f64> = (0..n).map(|_| separation * scale * gauss()).collect();
        let b: Vec<f64> = (0..samples)
            .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 })
            .collect();
        let mut a = DenseMatrix::zeros(n, samples);
        for j in 0..samples {
            for i in 0..n {
                a[(i, j)] = b[j] * mu[i] + gauss();
            }
        }
        Self::new(a, b)
    }

    /// Pixels of the images labelled `positive` or `negative`, scaled to `[0, 1]`.
    pub fn from_idx(images: &IdxImages, labels: &[u8], positive: u8, negative: u8) -> Result<Self> {
        check_dim(images.count, labels.len())?;
        let keep: Vec<usize> = (0..labels.len())
            .filter(|&i| labels[i] == positive || labels[i] == negative)
            .collect();
        if keep.is_empty() {
            return Err(Error::InvalidArgument(
                "no samples with the requested labels".into(),
            ));
        }
        let n = images.rows * images.cols;
        let mut a = DenseMatrix::zeros(n, keep.len());
        for (j, &s) in keep.iter().enumerate() {
            for i in 0..n {
                a[(i, j)] = images.pixels[s * n + i] as f64 / 255.0;
            }
        }
        let b = keep
            .iter()
            .map(|&s| if labels[s] == positive { 1.0 } else { -1.0 })
            .collect();
        Self::new(a, b)
    }
}

/// `f(z)`, `∇f(z)` and the Hessian-vector product at `z`.
pub fn classification_fgh<'p>(
    p: &'p ClassificationProblem,
    z: &[f64],
) -> Result<(f64, Vec<f64>, impl Fn(&[f64]) -> Result<Vec<f64>> + 'p)> {
    let f = p.value(z)?;
    let g = p.gradient(z)?;
    let z = z.to_vec();
    Ok((f, g, move |v: &[f64]| p.hvp(&z, v)))
}

impl Objective for ClassificationProblem {
    fn dim(&self) -> usize {
        self.n()
    }
    fn value(&self, z: &[f64]) -> Result<f64> {
        ClassificationProblem::value(self, z)
    }
    fn gradient(&self, z: &[f64]) -> Result<Vec<f64>> {
        ClassificationProblem::gradient(self, z)
    }
    fn hvp(&self, z: &[f64], v: &[f64]) -> Vec<f64> {
        ClassificationProblem::hvp(self, z, v).unwrap_or_else(|_| vec![f64::NAN; v.len()])
    }
}

/// Unsigned-byte image tensor from an IDX file.
#[derive(Clone, Debug)]
pub struct IdxImages {
    pub count: usize,
    pub rows: usize,
    pub cols: usize,
    pub pixels: Vec<u8>,
}

const IDX_U8_IMAGES: u32 = 0x0000_0803;
const IDX_U8_LABELS: u32 = 0x0000_0801;

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_be_bytes(buf))
}

fn check_magic(found: u32, expected: u32) -> Result<()> {
    if found != expected {
        return Err(Error::Parse {
            line: 0,
            message: format!("IDX magic {found:#010x}, expected {expected:#010x}"),
        });
    }
    Ok(())
}

pub fn parse_idx_images(mut r: impl Read) -> Result<IdxImages> {
    check_magic(read_u32(&mut r)?, IDX_U8_IMAGES)?;
    let count = read_u32(&mut r)? as usize;
    let rows = read_u32(&mut r)? as usize;
    let cols = read_u32(&mut r)? as usize;
    let mut pixels = vec![0u8; count * rows * cols];
    r.read_exact(&mut pixels)?;
    Ok(IdxImages {
        count,
        rows,
        cols,
        pixels,
    })
}

pub fn parse_idx_labels(mut r: impl Read) -> Result<Vec<u8>> {
    check_magic(read_u32(&mut r)?, IDX_U8_LABELS)?;
    let count = read_u32(&mut r)? as usize;
    let mut labels = vec![0u8; count];
    r.read_exact(&mut labels)?;
    Ok(labels)
}

pub fn read_idx_images(path: impl AsRef<Path>) -> Result<IdxImages> {
    parse_idx_images(std::io::BufReader::new(std::fs::File::open(path)?))
}

pub fn read_idx_labels(path: impl AsRef<Path>) -> Result<Vec<u8>> {
    parse_idx_labels(std::io::BufReader::new(std::fs::File::open(path)?))
}
