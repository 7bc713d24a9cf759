use crate::error::{Error, Result};

/// Nodal values and slopes of a function on a partition.
#[derive(Debug, Clone, PartialEq)]
pub struct HermiteData {
    nodes: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl HermiteData {
    pub fn new(nodes: Vec<f64>, values: Vec<f64>, slopes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidSpec("Hermite data needs at least two nodes".into()));
        }
        if values.len() != nodes.len() {
            return Err(Error::DimensionMismatch {
                expected: nodes.len(),
                found: values.len(),
            });
        }
        if slopes.len() != nodes.len() {
            return Err(Error::DimensionMismatch {
                expected: nodes.len(),
                found: slopes.len(),
            });
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidSpec("Hermite nodes must be strictly increasing".into()));
        }
        Ok(HermiteData {
            nodes,
            values,
            slopes,
        })
    }

    /// Samples `f` and `df` at `nodes`.
    pub fn sample<F, D>(nodes: &[f64], f: F, df: D) -> Result<Self>
    where
        F: Fn(f64) -> f64,
        D: Fn(f64) -> f64,
    {
        Self::new(
            nodes.to_vec(),
            nodes.iter().map(|&x| f(x)).collect(),
            nodes.iter().map(|&x| df(x)).collect(),
        )
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }
}

/// One polynomial piece in Newton form over doubled nodes.
#[derive(Debug, Clone, PartialEq)]
struct Piece {
    start: f64,
    centers: Vec<f64>,
    coeffs: Vec<f64>,
}

impl Piece {
    fn eval(&self, x: f64, deriv: usize) -> f64 {
        let m = self.coeffs.len() - 1;
        let (mut p, mut d1, mut d2) = (self.coeffs[m], 0.0, 0.0);
        for k in (0..m).rev() {
            let dx = x - self.centers[k];
            d2 = d2 * dx + 2.0 * d1;
            d1 = d1 * dx + p;
            p = p * dx + self.coeffs[k];
        }
        match deriv {
            0 => p,
            1 => d1,
            2 => d2,
            _ => panic!("derivative order {deriv} not supported"),
        }
    }
}

/// Piecewise Hermite interpolant: on each group of `n` consecutive intervals,
/// the unique polynomial of degree `2n + 1` matching all values and slopes at
/// the group's `n + 1` nodes. Globally C1.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseHermite {
    breaks: Vec<f64>,
    pieces: Vec<Piece>,
    nodes: Vec<f64>,
}

impl PiecewiseHermite {
    pub fn group_size(&self) -> usize {
        (self.nodes.len() - 1) / self.pieces.len()
    }

    /// Degree of each polynomial piece.
    pub fn degree(&self) -> usize {
        2 * self.group_size() + 1
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn eval(&self, x: f64, deriv: usize) -> f64 {
        let idx = self
            .breaks
            .partition_point(|&b| b <= x)
            .saturating_sub(1)
            .min(self.pieces.len() - 1);
        self.pieces[idx].eval(x, deriv)
    }
}

/// Builds the piecewise Hermite interpolant with `group` intervals per piece.
pub fn hermite_interpolant(data: &HermiteData, group: usize) -> Result<PiecewiseHermite> {
    let intervals = data.nodes.len() - 1;
    if group == 0 || !intervals.is_multiple_of(group) {
        return Err(Error::BadGrouping { intervals, group });
    }
    let pieces = (0..intervals / group)
        .map(|g| {
            let lo = g * group;
            let hi = lo + group;
            newton_piece(
                &data.nodes[lo..=hi],
                &data.values[lo..=hi],
                &data.slopes[lo..=hi],
            )
        })
        .collect::<Vec<_>>();
    let breaks = pieces.iter().map(|p| p.start).collect();
    Ok(PiecewiseHermite {
        breaks,
        pieces,
        nodes: data.nodes.clone(),
    })
}

/// Confluent divided differences on `z = [x0, x0, x1, x1, ...]`.
fn newton_piece(x: &[f64], y: &[f64], dy: &[f64]) -> Piece {
    let m = 2 * x.len();
    let z: Vec<f64> = x.iter().flat_map(|&v| [v, v]).collect();
    let mut table: Vec<f64> = y.iter().flat_map(|&v| [v, v]).collect();
    let mut coeffs = Vec::with_capacity(m);
    coeffs.push(table[0]);
    for order in 1..m {
        for i in (order..m).rev() {
            let span = z[i] - z[i - order];
            table[i] = if span == 0.0 {
                // Only repeated pairs coincide, at first order.
                dy[i / 2]
            } else {
                (table[i] - table[i - 1]) / span
            };
        }
        coeffs.push(table[order]);
    }
    Piece {
        start: x[0],
        centers: z,
        coeffs,
    }
}
