//! Layer-adapted meshes on [0, 1].
//!
//! Three constructions are available:
//!
//! * [`MeshKind::Exp`]: exponentially graded near both endpoints with the
//!   logarithmic generating function `phi(t) = -ln(1 - 4 C t)`, equidistant in
//!   the middle.
//! * [`MeshKind::Shishkin`]: piecewise uniform with transition point
//!   `tau = min(1/4, (p+1)(eps/beta) ln N)`.
//! * [`MeshKind::Uniform`]: `x_j = j/N`.
//!
//! Every node is evaluated from its closed-form expression (never by summing
//! widths), so the mirrored meshes are symmetric to rounding.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeshKind {
    Exp,
    Shishkin,
    Uniform,
}

impl fmt::Display for MeshKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MeshKind::Exp => "exp",
            MeshKind::Shishkin => "shishkin",
            MeshKind::Uniform => "uniform",
        })
    }
}

impl FromStr for MeshKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exp" => Ok(MeshKind::Exp),
            "shishkin" => Ok(MeshKind::Shishkin),
            "uniform" => Ok(MeshKind::Uniform),
            other => Err(Error::InvalidSpec(format!("unknown mesh kind `{other}`"))),
        }
    }
}

/// Region tag of an element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    LeftLayer,
    Interior,
    RightLayer,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Region::LeftLayer => "left",
            Region::Interior => "interior",
            Region::RightLayer => "right",
        })
    }
}

/// Parameters of a mesh construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeshSpec {
    /// Singular perturbation parameter, in (0, 1].
    pub epsilon: f64,
    /// Layer exponent of the boundary-layer functions `exp(-beta x / eps)`.
    pub beta: f64,
    /// Polynomial degree of the finite element space.
    pub p: usize,
    /// Number of elements N.
    pub n_elements: usize,
    pub kind: MeshKind,
}

impl MeshSpec {
    pub fn new(kind: MeshKind, epsilon: f64, beta: f64, p: usize, n_elements: usize) -> Self {
        MeshSpec {
            epsilon,
            beta,
            p,
            n_elements,
            kind,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(Error::InvalidSpec(format!(
                "epsilon = {} must lie in (0, 1]",
                self.epsilon
            )));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::InvalidSpec(format!("beta = {} must be positive", self.beta)));
        }
        if self.p < 3 {
            return Err(Error::InvalidSpec(format!("p = {} must be at least 3", self.p)));
        }
        match self.kind {
            MeshKind::Exp | MeshKind::Shishkin => {
                if self.n_elements <= 4 || !self.n_elements.is_multiple_of(4) {
                    return Err(Error::InvalidSpec(format!(
                        "N = {} must be a multiple of 4 greater than 4 for {} meshes",
                        self.n_elements, self.kind
                    )));
                }
            }
            MeshKind::Uniform => {
                if self.n_elements == 0 {
                    return Err(Error::InvalidSpec("N must be at least 1".into()));
                }
            }
        }
        Ok(())
    }

    pub fn grading(&self) -> GradingFunction {
        GradingFunction::new(self.epsilon, self.beta, self.p)
    }

    /// `(eps/beta)(p+1)`, the length scale multiplying the generating function.
    pub fn layer_scale(&self) -> f64 {
        self.epsilon / self.beta * (self.p as f64 + 1.0)
    }
}

/// Mesh generating function `phi(t) = -ln(1 - 4 C t)` with
/// `C = 1 - exp(-beta / ((p+1) eps))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradingFunction {
    c_pe: f64,
}

impl GradingFunction {
    pub fn new(epsilon: f64, beta: f64, p: usize) -> Self {
        let c_pe = -(-beta / ((p as f64 + 1.0) * epsilon)).exp_m1();
        GradingFunction { c_pe }
    }

    pub fn c_pe(&self) -> f64 {
        self.c_pe
    }

    pub fn phi(&self, t: f64) -> f64 {
        -(-4.0 * self.c_pe * t).ln_1p()
    }

    pub fn dphi(&self, t: f64) -> f64 {
        4.0 * self.c_pe / self.psi(t)
    }

    /// `psi = exp(-phi) = 1 - 4 C t`.
    pub fn psi(&self, t: f64) -> f64 {
        1.0 - 4.0 * self.c_pe * t
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mesh {
    nodes: Vec<f64>,
    widths: Vec<f64>,
    regions: Vec<Region>,
    spec: MeshSpec,
}

impl Mesh {
    /// Builds the mesh described by `spec`, dispatching on its kind.
    pub fn build(spec: &MeshSpec) -> Result<Mesh> {
        match spec.kind {
            MeshKind::Exp => build_exp_mesh(spec),
            MeshKind::Shishkin => build_shishkin_mesh(spec),
            MeshKind::Uniform => build_uniform_mesh(spec),
        }
    }

    fn from_nodes(nodes: Vec<f64>, regions: Vec<Region>, spec: MeshSpec) -> Result<Mesh> {
        debug_assert_eq!(nodes.len(), regions.len() + 1);
        let widths: Vec<f64> = nodes.windows(2).map(|w| w[1] - w[0]).collect();
        if let Some(j) = widths.iter().position(|&h| !(h > 0.0)) {
            return Err(Error::InvalidSpec(format!(
                "mesh nodes are not strictly increasing at element {j}"
            )));
        }
        Ok(Mesh {
            nodes,
            widths,
            regions,
            spec,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn widths(&self) -> &[f64] {
        &self.widths
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn spec(&self) -> &MeshSpec {
        &self.spec
    }

    pub fn kind(&self) -> MeshKind {
        self.spec.kind
    }

    pub fn n_elements(&self) -> usize {
        self.widths.len()
    }

    pub fn max_width(&self) -> f64 {
        self.widths.iter().copied().fold(0.0, f64::max)
    }

    /// Index of the element containing `x`; points on an interior node belong
    /// to the element on their right, `x = 1` to the last element.
    pub fn locate(&self, x: f64) -> usize {
        let n = self.n_elements();
        let idx = self.nodes.partition_point(|&node| node <= x);
        idx.saturating_sub(1).min(n - 1)
    }

    /// End of the left graded region, `x_{N/4-1}` for eXp meshes and `tau`
    /// for Shishkin meshes. `None` for uniform meshes.
    pub fn transition_point(&self) -> Option<f64> {
        let n = self.n_elements();
        match self.spec.kind {
            MeshKind::Exp => Some(self.nodes[n / 4 - 1]),
            MeshKind::Shishkin => Some(self.nodes[n / 4]),
            MeshKind::Uniform => None,
        }
    }

    /// Writes one row per node: `index,x,region` where region is the tag of the
    /// element to the right of the node (`none` for the last node).
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        wtr.write_record(["index", "x", "region"])?;
        for (j, x) in self.nodes.iter().enumerate() {
            let region = self
                .regions
                .get(j)
                .map_or_else(|| "none".to_string(), Region::to_string);
            wtr.write_record([j.to_string(), format!("{x:.16e}"), region])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Exponentially graded mesh.
///
/// Nodes `j = 0..N/4-1` are `(eps/beta)(p+1) phi(j/N)`, nodes
/// `j = 3N/4+1..N` are their mirror images, and `[x_{N/4-1}, x_{3N/4+1}]` is
/// split into `N/2+2` equal elements.
pub fn build_exp_mesh(spec: &MeshSpec) -> Result<Mesh> {
    if spec.kind != MeshKind::Exp {
        return Err(Error::WrongMeshKind {
            expected: MeshKind::Exp,
            found: spec.kind,
        });
    }
    spec.validate()?;
    let n = spec.n_elements;
    let q = n / 4;
    let grading = spec.grading();
    let scale = spec.layer_scale();
    let graded = |j: usize| scale * grading.phi(j as f64 / n as f64);

    let extent = graded(q - 1);
    if !(extent < 0.5) {
        return Err(Error::RegionOverlap { extent });
    }

    let left = extent;
    let right = 1.0 - extent;
    let pieces = (n / 2 + 2) as f64;
    let mut nodes = vec![0.0; n + 1];
    for (j, x) in nodes.iter_mut().enumerate() {
        *x = if j < q {
            graded(j)
        } else if j <= 3 * q {
            left + (right - left) * ((j + 1 - q) as f64 / pieces)
        } else {
            1.0 - graded(n - j)
        };
    }

    let regions = (0..n)
        .map(|e| {
            if e + 1 < q {
                Region::LeftLayer
            } else if e > 3 * q {
                Region::RightLayer
            } else {
                Region::Interior
            }
        })
        .collect();
    Mesh::from_nodes(nodes, regions, *spec)
}

pub fn build_uniform_mesh(spec: &MeshSpec) -> Result<Mesh> {
    if spec.kind != MeshKind::Uniform {
        return Err(Error::WrongMeshKind {
            expected: MeshKind::Uniform,
            found: spec.kind,
        });
    }
    spec.validate()?;
    let n = spec.n_elements;
    let nodes = (0..=n).map(|j| j as f64 / n as f64).collect();
    Mesh::from_nodes(nodes, vec![Region::Interior; n], *spec)
}

/// Piecewise uniform Shishkin mesh: N/4 elements on each of `[0, tau]` and
/// `[1 - tau, 1]`, N/2 elements in between.
pub fn build_shishkin_mesh(spec: &MeshSpec) -> Result<Mesh> {
    if spec.kind != MeshKind::Shishkin {
        return Err(Error::WrongMeshKind {
            expected: MeshKind::Shishkin,
            found: spec.kind,
        });
    }
    spec.validate()?;
    let n = spec.n_elements;
    let q = n / 4;
    let tau = shishkin_transition(spec);
    let nf = n as f64;
    let nodes = (0..=n)
        .map(|j| {
            if j <= q {
                4.0 * tau * j as f64 / nf
            } else if j < 3 * q {
                tau + (1.0 - 2.0 * tau) * ((j - q) as f64 / (nf / 2.0))
            } else {
                1.0 - 4.0 * tau * (n - j) as f64 / nf
            }
        })
        .collect();
    let regions = (0..n)
        .map(|e| {
            if e < q {
                Region::LeftLayer
            } else if e >= 3 * q {
                Region::RightLayer
            } else {
                Region::Interior
            }
        })
        .collect();
    Mesh::from_nodes(nodes, regions, *spec)
}

pub fn shishkin_transition(spec: &MeshSpec) -> f64 {
    (spec.layer_scale() * (spec.n_elements as f64).ln()).min(0.25)
}

/// Measured width of one graded element against its grading bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ElementBound {
    pub element: usize,
    pub width: f64,
    pub bound: f64,
    /// `width / bound`; at most 1 when satisfied.
    pub ratio: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport {
    /// Whether `eps < 1/N`, the regime in which the bounds are asserted.
    pub singularly_perturbed: bool,
    pub elements: Vec<ElementBound>,
    /// `exp(-beta x_{N/4-1} / eps)`.
    pub transition_decay: f64,
    /// `transition_decay * N^(p+1)`.
    pub transition_ratio: f64,
    /// Constant `4^(p+1)` the ratio is compared against.
    pub transition_constant: f64,
    pub transition_satisfied: bool,
}

impl BoundsReport {
    pub fn all_satisfied(&self) -> bool {
        self.transition_satisfied && self.elements.iter().all(|e| e.satisfied)
    }
}

/// Checks graded widths against `h_j <= (eps/beta)(p+1) exp(d_j / ((p+1) eps))`,
/// `d_j` being the distance from the nearer endpoint of [0, 1] to the far end
/// of element j, and reports the decay of the layer function at the
/// transition point.
pub fn check_mesh_bounds(mesh: &Mesh) -> Result<BoundsReport> {
    let spec = mesh.spec();
    if spec.kind != MeshKind::Exp {
        return Err(Error::WrongMeshKind {
            expected: MeshKind::Exp,
            found: spec.kind,
        });
    }
    let n = mesh.n_elements();
    let q = n / 4;
    let p1 = spec.p as f64 + 1.0;
    let scale = spec.layer_scale();
    let nodes = mesh.nodes();

    let mut elements = Vec::with_capacity(2 * (q - 1));
    let mut push = |e: usize, dist: f64| {
        let width = mesh.widths()[e];
        let bound = scale * (dist / (p1 * spec.epsilon)).exp();
        elements.push(ElementBound {
            element: e,
            width,
            bound,
            ratio: width / bound,
            satisfied: width <= bound,
        });
    };
    for e in 0..q - 1 {
        push(e, nodes[e + 1]);
    }
    for e in 3 * q + 1..n {
        push(e, 1.0 - nodes[e]);
    }

    let transition_decay = (-spec.beta * nodes[q - 1] / spec.epsilon).exp();
    let transition_ratio = transition_decay * (n as f64).powf(p1);
    let transition_constant = 4f64.powf(p1);
    Ok(BoundsReport {
        singularly_perturbed: spec.epsilon < 1.0 / n as f64,
        elements,
        transition_decay,
        transition_ratio,
        transition_constant,
        // The bound is attained with equality once C rounds to 1.
        transition_satisfied: transition_ratio <= transition_constant * (1.0 + 1e-10),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp_spec(epsilon: f64, p: usize, n: usize) -> MeshSpec {
        MeshSpec::new(MeshKind::Exp, epsilon, 1.0, p, n)
    }

    #[test]
    fn exp_mesh_endpoints_and_symmetry() {
        for &(eps, p, n) in &[(1e-3, 3, 16), (1e-6, 3, 64), (1e-2, 5, 8), (1e-8, 4, 128)] {
            let mesh = build_exp_mesh(&exp_spec(eps, p, n)).unwrap();
            let x = mesh.nodes();
            assert_eq!(x[0], 0.0);
            assert_eq!(x[n], 1.0);
            for j in 0..=n {
                assert!((x[j] + x[n - j] - 1.0).abs() <= 1e-14, "j = {j}");
            }
        }
    }

    #[test]
    fn exp_mesh_node_formula() {
        // x_3 for eps=1e-3, beta=1, p=3, N=16 from the closed form:
        // 4e-3 * -ln(1 - 0.75 C), C = 1 - exp(-250).
        let mesh = build_exp_mesh(&exp_spec(1e-3, 3, 16)).unwrap();
        let c = 1.0 - (-250.0f64).exp();
        let expected = 4e-3 * -(1.0 - 0.75 * c).ln();
        assert!((mesh.nodes()[3] - expected).abs() <= 1e-16);
        assert!((mesh.nodes()[3] - 5.545_177_444_479_562e-3).abs() < 1e-15);
    }

    #[test]
    fn exp_mesh_region_counts() {
        let n = 32;
        let mesh = build_exp_mesh(&exp_spec(1e-4, 3, n)).unwrap();
        let count = |r| mesh.regions().iter().filter(|&&t| t == r).count();
        assert_eq!(count(Region::LeftLayer), n / 4 - 1);
        assert_eq!(count(Region::RightLayer), n / 4 - 1);
        assert_eq!(count(Region::Interior), n / 2 + 2);
        let interior: Vec<f64> = mesh
            .widths()
            .iter()
            .zip(mesh.regions())
            .filter(|(_, &r)| r == Region::Interior)
            .map(|(&h, _)| h)
            .collect();
        for h in &interior {
            assert!((h - interior[0]).abs() < 1e-15);
        }
    }

    #[test]
    fn exp_mesh_rejects_overlap_and_bad_specs() {
        assert!(matches!(
            build_exp_mesh(&exp_spec(1.0, 3, 64)),
            Err(Error::RegionOverlap { .. })
        ));
        assert!(matches!(
            build_exp_mesh(&exp_spec(1e-3, 3, 4)),
            Err(Error::InvalidSpec(_))
        ));
        assert!(matches!(
            build_exp_mesh(&exp_spec(1e-3, 3, 18)),
            Err(Error::InvalidSpec(_))
        ));
        assert!(matches!(
            build_exp_mesh(&exp_spec(1e-3, 2, 16)),
            Err(Error::InvalidSpec(_))
        ));
        assert!(matches!(
            build_exp_mesh(&exp_spec(0.0, 3, 16)),
            Err(Error::InvalidSpec(_))
        ));
        let uniform = MeshSpec::new(MeshKind::Uniform, 1e-3, 1.0, 3, 16);
        assert!(matches!(
            build_exp_mesh(&uniform),
            Err(Error::WrongMeshKind { .. })
        ));
    }

    #[test]
    fn uniform_mesh() {
        let mesh = build_uniform_mesh(&MeshSpec::new(MeshKind::Uniform, 1.0, 1.0, 3, 4)).unwrap();
        assert_eq!(mesh.nodes(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        let mesh = build_uniform_mesh(&MeshSpec::new(MeshKind::Uniform, 1.0, 1.0, 3, 1)).unwrap();
        assert_eq!(mesh.nodes(), &[0.0, 1.0]);
        let mesh = build_uniform_mesh(&MeshSpec::new(MeshKind::Uniform, 1.0, 1.0, 3, 7)).unwrap();
        for h in mesh.widths() {
            assert!((h - 1.0 / 7.0).abs() < 1e-15);
        }
        assert!(mesh.regions().iter().all(|&r| r == Region::Interior));
    }

    #[test]
    fn shishkin_clamps_to_uniform() {
        let spec = MeshSpec::new(MeshKind::Shishkin, 0.5, 1.0, 3, 16);
        let mesh = build_shishkin_mesh(&spec).unwrap();
        assert_eq!(shishkin_transition(&spec), 0.25);
        for (j, x) in mesh.nodes().iter().enumerate() {
            assert!((x - j as f64 / 16.0).abs() < 1e-15);
        }
    }

    #[test]
    fn shishkin_nodes() {
        let spec = MeshSpec::new(MeshKind::Shishkin, 1e-4, 1.0, 3, 16);
        let mesh = build_shishkin_mesh(&spec).unwrap();
        let tau = 4e-4 * 16f64.ln();
        assert!((shishkin_transition(&spec) - tau).abs() < 1e-18);
        let x = mesh.nodes();
        assert!((x[4] - tau).abs() < 1e-18);
        assert!((x[2] - tau / 2.0).abs() < 1e-18);
        assert!((x[8] - 0.5).abs() < 1e-15);
        assert!((x[6] - (tau + (1.0 - 2.0 * tau) * 0.25)).abs() < 1e-15);
        for j in 0..=16 {
            assert!((x[j] + x[16 - j] - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn bounds_hold_in_perturbed_regime() {
        for &eps in &[1e-2, 1e-3, 1e-5, 1e-8] {
            for &n in &[8usize, 16, 32, 64] {
                if eps >= 1.0 / n as f64 {
                    continue;
                }
                let mesh = build_exp_mesh(&exp_spec(eps, 3, n)).unwrap();
                let report = check_mesh_bounds(&mesh).unwrap();
                assert!(report.singularly_perturbed);
                assert!(report.elements.iter().all(|e| e.satisfied), "eps {eps} N {n}");
            }
        }
    }

    #[test]
    fn transition_decay_oracle() {
        let mesh = build_exp_mesh(&exp_spec(1e-6, 3, 32)).unwrap();
        let report = check_mesh_bounds(&mesh).unwrap();
        // With C = 1 to double precision, exp(-x_{N/4-1}/eps) = (4/N)^(p+1).
        let direct = (4.0f64 / 32.0).powi(4);
        assert!((report.transition_decay - direct).abs() <= 1e-12 * direct);
        assert!((report.transition_ratio - 256.0).abs() < 1e-9);
        assert!(report.transition_satisfied);
    }

    #[test]
    fn bounds_reject_non_exp() {
        let mesh = Mesh::build(&MeshSpec::new(MeshKind::Uniform, 1e-3, 1.0, 3, 16)).unwrap();
        assert!(matches!(
            check_mesh_bounds(&mesh),
            Err(Error::WrongMeshKind { .. })
        ));
    }

    #[test]
    fn locate_elements() {
        let mesh = Mesh::build(&MeshSpec::new(MeshKind::Uniform, 1.0, 1.0, 3, 4)).unwrap();
        assert_eq!(mesh.locate(0.0), 0);
        assert_eq!(mesh.locate(0.25), 1);
        assert_eq!(mesh.locate(0.3), 1);
        assert_eq!(mesh.locate(1.0), 3);
    }

    #[test]
    fn csv_dump() {
        let mesh = Mesh::build(&MeshSpec::new(MeshKind::Uniform, 1.0, 1.0, 3, 2)).unwrap();
        let mut buf = Vec::new();
        mesh.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "index,x,region");
        assert_eq!(lines.len(), 4);
        assert!(lines[3].ends_with(",none"));
    }
}
