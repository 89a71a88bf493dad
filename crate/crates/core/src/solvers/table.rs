use crate::error::{Error, Result};
use crate::linalg;
use crate::objective::FiniteSumObjective;

/// How stored gradients are kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableMode {
    /// One scalar `c_i = ψ_i'(a_iᵀφ_i)` per point; the gradient is `c_i·a_i`.
    /// Only valid for loss-only components (no split L2 share).
    Scalar,
    /// One full `d`-vector per point.
    Dense,
}

impl TableMode {
    /// Scalar storage whenever the components allow it.
    pub fn preferred(obj: &FiniteSumObjective) -> Self {
        if obj.split_l2() == 0.0 {
            TableMode::Scalar
        } else {
            TableMode::Dense
        }
    }
}

/// A freshly computed gradient in the table's storage format.
#[derive(Debug, Clone, PartialEq)]
pub enum StoredGradient {
    Scalar(f64),
    Dense(Vec<f64>),
}

/// Stored gradients `f_i'(φ_i)` with their running average.
#[derive(Debug, Clone)]
pub struct GradientTable {
    mode: TableMode,
    n: usize,
    dim: usize,
    scalars: Vec<f64>,
    dense: Vec<f64>,
    average: Vec<f64>,
}

impl GradientTable {
    fn empty(obj: &FiniteSumObjective, mode: TableMode) -> Result<Self> {
        if mode == TableMode::Scalar && obj.split_l2() != 0.0 {
            return Err(Error::Unsupported(
                "scalar gradient storage needs loss-only components (split_l2 = 0)".into(),
            ));
        }
        let (n, dim) = (obj.n(), obj.dim());
        Ok(Self {
            mode,
            n,
            dim,
            scalars: if mode == TableMode::Scalar { vec![0.0; n] } else { Vec::new() },
            dense: if mode == TableMode::Dense { vec![0.0; n * dim] } else { Vec::new() },
            average: vec![0.0; dim],
        })
    }

    /// All-zero table, used by the in-order first-pass warm start.
    pub fn zeros(obj: &FiniteSumObjective, mode: TableMode) -> Result<Self> {
        Self::empty(obj, mode)
    }

    /// Table with every `φ_i = x`.
    pub fn at_point(obj: &FiniteSumObjective, x: &[f64], mode: TableMode) -> Result<Self> {
        let mut t = Self::empty(obj, mode)?;
        for i in 0..t.n {
            let g = t.evaluate(obj, i, x);
            t.write(obj, i, g)?;
        }
        t.average = t.recompute_average(obj);
        Ok(t)
    }

    /// Table with a separate `φ_i` per point.
    pub fn at_points(obj: &FiniteSumObjective, points: &[Vec<f64>], mode: TableMode) -> Result<Self> {
        if points.len() != obj.n() {
            return Err(Error::InvalidInput(format!(
                "{} points for {} components",
                points.len(),
                obj.n()
            )));
        }
        let mut t = Self::empty(obj, mode)?;
        for (i, p) in points.iter().enumerate() {
            if p.len() != t.dim {
                return Err(Error::InvalidInput("point has wrong dimension".into()));
            }
            let g = t.evaluate(obj, i, p);
            t.write(obj, i, g)?;
        }
        t.average = t.recompute_average(obj);
        Ok(t)
    }

    pub fn mode(&self) -> TableMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `(1/n) Σ_i f_i'(φ_i)`, maintained incrementally.
    pub fn average(&self) -> &[f64] {
        &self.average
    }

    /// Stored scalar weight `c_j` (scalar mode only).
    pub fn scalar(&self, j: usize) -> Option<f64> {
        match self.mode {
            TableMode::Scalar => Some(self.scalars[j]),
            TableMode::Dense => None,
        }
    }

    /// `out += alpha · f_j'(φ_j)`
    #[inline]
    pub fn add_entry_to(&self, obj: &FiniteSumObjective, j: usize, alpha: f64, out: &mut [f64]) {
        match self.mode {
            TableMode::Scalar => obj.point(j).add_scaled_to(alpha * self.scalars[j], out),
            TableMode::Dense => linalg::axpy(alpha, &self.dense[j * self.dim..(j + 1) * self.dim], out),
        }
    }

    /// `f_j'(φ_j)` as a dense vector.
    pub fn entry(&self, obj: &FiniteSumObjective, j: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.add_entry_to(obj, j, 1.0, &mut out);
        out
    }

    /// `f_j'(x)` in this table's storage format.
    #[inline]
    pub fn evaluate(&self, obj: &FiniteSumObjective, j: usize, x: &[f64]) -> StoredGradient {
        match self.mode {
            TableMode::Scalar => StoredGradient::Scalar(obj.loss_derivative_at(j, x)),
            TableMode::Dense => StoredGradient::Dense(obj.gradient_at(j, x)),
        }
    }

    /// Dense form of a stored gradient for point `j`.
    pub fn materialize(&self, obj: &FiniteSumObjective, j: usize, g: &StoredGradient) -> Vec<f64> {
        match g {
            StoredGradient::Scalar(c) => {
                let mut out = vec![0.0; self.dim];
                obj.point(j).add_scaled_to(*c, &mut out);
                out
            }
            StoredGradient::Dense(v) => v.clone(),
        }
    }

    /// Overwrites entry `j` without touching the average.
    fn write(&mut self, obj: &FiniteSumObjective, j: usize, g: StoredGradient) -> Result<StoredGradient> {
        let _ = obj;
        match (self.mode, g) {
            (TableMode::Scalar, StoredGradient::Scalar(c)) => {
                Ok(StoredGradient::Scalar(std::mem::replace(&mut self.scalars[j], c)))
            }
            (TableMode::Dense, StoredGradient::Dense(v)) => {
                if v.len() != self.dim {
                    return Err(Error::InvalidInput("stored gradient has wrong dimension".into()));
                }
                let slot = &mut self.dense[j * self.dim..(j + 1) * self.dim];
                let old = slot.to_vec();
                slot.copy_from_slice(&v);
                Ok(StoredGradient::Dense(old))
            }
            (mode, _) => Err(Error::InvalidInput(format!(
                "stored gradient format does not match {mode:?} table"
            ))),
        }
    }

    /// Replaces entry `j` and moves the average by `(new − old)/n`.
    pub fn replace(&mut self, obj: &FiniteSumObjective, j: usize, new: StoredGradient) -> Result<()> {
        let inv_n = 1.0 / self.n as f64;
        match self.write(obj, j, new)? {
            StoredGradient::Scalar(old) => {
                let change = self.scalars[j] - old;
                obj.point(j).add_scaled_to(change * inv_n, &mut self.average);
            }
            StoredGradient::Dense(old) => {
                let slot = &self.dense[j * self.dim..(j + 1) * self.dim];
                for ((a, new), old) in self.average.iter_mut().zip(slot).zip(&old) {
                    *a += (new - old) * inv_n;
                }
            }
        }
        Ok(())
    }

    /// Average recomputed from the stored entries.
    pub fn recompute_average(&self, obj: &FiniteSumObjective) -> Vec<f64> {
        let mut avg = vec![0.0; self.dim];
        let inv_n = 1.0 / self.n as f64;
        for j in 0..self.n {
            self.add_entry_to(obj, j, inv_n, &mut avg);
        }
        avg
    }

    /// Resets the running average to its exact value; returns the drift that
    /// had accumulated (max abs difference).
    pub fn resync(&mut self, obj: &FiniteSumObjective) -> f64 {
        let exact = self.recompute_average(obj);
        let drift = linalg::max_abs_diff(&exact, &self.average);
        self.average = exact;
        drift
    }
}
