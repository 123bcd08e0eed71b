//! Domains, structured meshes with radial and cylindrical weights, and the
//! isometries under which a domain is invariant.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::discretization::quadrature::unit_sphere_area;

/// Symbolic description of a computational domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DomainSpec {
    Interval { a: f64, b: f64 },
    /// Ball of radius `radius` in ℝ^dim, discretised radially.
    Ball { dim: u32, radius: f64 },
    /// `{inner < |x| < outer}` in ℝ^dim, discretised radially.
    Annulus { dim: u32, inner: f64, outer: f64 },
    #[serde(rename = "box")]
    Box2D { lx: f64, ly: f64 },
    #[serde(rename = "disk")]
    Disk2D { radius: f64 },
    /// Cylinder `B' × (-1, 1)` with unit half-ball caps in ℝ^dim, stretched
    /// along the axis by `λ_n` (slope `stretch` on `[0, 1]`, caps of height `layer`).
    Dumbbell { dim: u32, stretch: u32, layer: f64 },
}

impl DomainSpec {
    pub fn interval(a: f64, b: f64) -> Self {
        DomainSpec::Interval { a, b }
    }

    pub fn unit_interval() -> Self {
        DomainSpec::Interval { a: 0.0, b: 1.0 }
    }

    pub fn ball(dim: u32, radius: f64) -> Self {
        DomainSpec::Ball { dim, radius }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Domain(msg));
        match *self {
            DomainSpec::Interval { a, b } if !(a < b) => bad(format!("interval needs a < b, got ({a}, {b})")),
            DomainSpec::Ball { dim, radius } if dim < 1 || !(radius > 0.0) => {
                bad(format!("ball needs N ≥ 1 and R > 0, got N = {dim}, R = {radius}"))
            }
            DomainSpec::Annulus { dim, inner, outer } if dim < 1 || !(inner > 0.0 && inner < outer) => {
                bad(format!("annulus needs N ≥ 1 and 0 < a < b, got ({inner}, {outer})"))
            }
            DomainSpec::Box2D { lx, ly } if !(lx > 0.0 && ly > 0.0) => bad("box sides must be positive".into()),
            DomainSpec::Disk2D { radius } if !(radius > 0.0) => bad("disk radius must be positive".into()),
            DomainSpec::Dumbbell { dim, stretch, layer } => {
                if dim < 4 {
                    return bad(format!("dumbbell needs N ≥ 4, got {dim}"));
                }
                if stretch < 1 {
                    return bad("dumbbell stretch factor must be ≥ 1".into());
                }
                if !(layer > 0.0) {
                    return bad(format!("dumbbell layer width must be positive, got {layer}"));
                }
                StretchMap::new(stretch, layer).map(|_| ())
            }
            _ => Ok(()),
        }
    }

    /// Isometries of the domain sampled for symmetry checks.
    pub fn symmetries(&self) -> Vec<Isometry> {
        match *self {
            DomainSpec::Interval { a, b } => vec![
                Isometry::identity(),
                Isometry::new("reflection", [[-1.0, 0.0], [0.0, 1.0]], [0.5 * (a + b), 0.0]),
            ],
            DomainSpec::Box2D { lx, ly } => {
                let c = [0.5 * lx, 0.5 * ly];
                let mut out = vec![
                    Isometry::new("identity", [[1.0, 0.0], [0.0, 1.0]], c),
                    Isometry::new("rotation-180", [[-1.0, 0.0], [0.0, -1.0]], c),
                    Isometry::new("reflection-x", [[-1.0, 0.0], [0.0, 1.0]], c),
                    Isometry::new("reflection-y", [[1.0, 0.0], [0.0, -1.0]], c),
                ];
                if lx == ly {
                    out.extend([
                        Isometry::new("rotation-90", [[0.0, -1.0], [1.0, 0.0]], c),
                        Isometry::new("rotation-270", [[0.0, 1.0], [-1.0, 0.0]], c),
                        Isometry::new("reflection-diagonal", [[0.0, 1.0], [1.0, 0.0]], c),
                        Isometry::new("reflection-antidiagonal", [[0.0, -1.0], [-1.0, 0.0]], c),
                    ]);
                }
                out
            }
            DomainSpec::Disk2D { .. } => {
                let mut out: Vec<Isometry> = (0..8)
                    .map(|k| Isometry::rotation(k as f64 * PI / 4.0, [0.0, 0.0]))
                    .collect();
                out.extend((0..8).map(|k| Isometry::reflection(k as f64 * PI / 8.0, [0.0, 0.0])));
                out
            }
            DomainSpec::Dumbbell { .. } => vec![
                Isometry::identity(),
                Isometry::new("reflection-axial", [[1.0, 0.0], [0.0, -1.0]], [0.0, 0.0]),
            ],
            DomainSpec::Ball { .. } | DomainSpec::Annulus { .. } => vec![Isometry::identity()],
        }
    }

    /// Whether `iso` maps the (discretised representation of the) domain onto itself.
    pub fn admits(&self, iso: &Isometry) -> bool {
        if !iso.is_orthogonal() {
            return false;
        }
        let m = iso.matrix;
        let near = |a: f64, b: f64| (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()));
        let signed_permutation = m.iter().flatten().all(|v| near(*v, 0.0) || near(v.abs(), 1.0));
        match *self {
            DomainSpec::Interval { a, b } => {
                near(m[0][1], 0.0)
                    && (near(m[0][0], 1.0) || near(iso.center[0], 0.5 * (a + b)))
            }
            DomainSpec::Box2D { lx, ly } => {
                let swaps = near(m[0][0], 0.0);
                signed_permutation
                    && (m == [[1.0, 0.0], [0.0, 1.0]]
                        || (near(iso.center[0], 0.5 * lx) && near(iso.center[1], 0.5 * ly)))
                    && (!swaps || lx == ly)
            }
            DomainSpec::Disk2D { .. } => {
                m == [[1.0, 0.0], [0.0, 1.0]] || (near(iso.center[0], 0.0) && near(iso.center[1], 0.0))
            }
            DomainSpec::Dumbbell { .. } => {
                near(m[0][0], 1.0) && near(m[0][1], 0.0) && near(m[1][0], 0.0) && near(iso.center[1], 0.0)
            }
            DomainSpec::Ball { .. } | DomainSpec::Annulus { .. } => {
                near(m[0][0], 1.0) && near(m[0][1], 0.0)
            }
        }
    }
}

/// `x ↦ center + M (x − center)` in the mesh coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Isometry {
    pub name: String,
    pub matrix: [[f64; 2]; 2],
    pub center: [f64; 2],
}

impl Isometry {
    pub fn new(name: &str, matrix: [[f64; 2]; 2], center: [f64; 2]) -> Self {
        Isometry { name: name.to_string(), matrix, center }
    }

    pub fn identity() -> Self {
        Isometry::new("identity", [[1.0, 0.0], [0.0, 1.0]], [0.0, 0.0])
    }

    pub fn rotation(angle: f64, center: [f64; 2]) -> Self {
        let (s, c) = angle.sin_cos();
        let snap = |v: f64| if v.abs() < 1e-15 { 0.0 } else { v };
        Isometry {
            name: format!("rotation-{:.0}", angle.to_degrees()),
            matrix: [[snap(c), snap(-s)], [snap(s), snap(c)]],
            center,
        }
    }

    /// Reflection across the line through `center` at `angle` from the first axis.
    pub fn reflection(angle: f64, center: [f64; 2]) -> Self {
        let (s, c) = (2.0 * angle).sin_cos();
        let snap = |v: f64| if v.abs() < 1e-15 { 0.0 } else { v };
        Isometry {
            name: format!("reflection-{:.1}", angle.to_degrees()),
            matrix: [[snap(c), snap(s)], [snap(s), snap(-c)]],
            center,
        }
    }

    pub fn apply(&self, p: [f64; 2]) -> [f64; 2] {
        let d = [p[0] - self.center[0], p[1] - self.center[1]];
        let m = &self.matrix;
        [
            self.center[0] + m[0][0] * d[0] + m[0][1] * d[1],
            self.center[1] + m[1][0] * d[0] + m[1][1] * d[1],
        ]
    }

    pub fn inverse(&self) -> Isometry {
        let m = &self.matrix;
        Isometry {
            name: format!("{}-inverse", self.name),
            matrix: [[m[0][0], m[1][0]], [m[0][1], m[1][1]]],
            center: self.center,
        }
    }

    pub fn is_rotation(&self) -> bool {
        let m = &self.matrix;
        m[0][0] * m[1][1] - m[0][1] * m[1][0] > 0.0
    }

    fn is_orthogonal(&self) -> bool {
        let m = &self.matrix;
        let a = m[0][0] * m[0][0] + m[1][0] * m[1][0];
        let b = m[0][1] * m[0][1] + m[1][1] * m[1][1];
        let c = m[0][0] * m[0][1] + m[1][0] * m[1][1];
        (a - 1.0).abs() < 1e-12 && (b - 1.0).abs() < 1e-12 && c.abs() < 1e-12
    }
}

/// Axial stretching `λ_n` of the dumbbell: `λ(y) = n y` on `[0, 1]`, a C²
/// concave increasing continuation to `λ(2) = n + ρ`, odd on `[-2, 2]`.
///
/// On `[1, 2]`, `λ'(1 + t) = c + (n − c) exp(−(t/τ)²)` with `c = ρ/2` and
/// `τ` fixed by `λ(2) = n + ρ`. When `ρ = n` the map is linear.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StretchMap {
    pub n: f64,
    pub rho: f64,
    floor_slope: f64,
    tau: f64,
    linear: bool,
}

impl StretchMap {
    pub fn new(n: u32, rho: f64) -> Result<Self> {
        let nf = n as f64;
        if !(rho > 0.0) {
            return Err(Error::Domain(format!("layer width must be positive, got {rho}")));
        }
        if rho > nf * (1.0 + 1e-12) {
            return Err(Error::Domain(format!(
                "a concave stretch with slope {n} cannot rise by ρ = {rho} > {n} on [1, 2]"
            )));
        }
        if (rho - nf).abs() <= 1e-12 * nf {
            return Ok(StretchMap { n: nf, rho, floor_slope: nf, tau: f64::INFINITY, linear: true });
        }
        let c = 0.5 * rho;
        let rise = |tau: f64| c + (nf - c) * tau * 0.5 * PI.sqrt() * libm::erf(1.0 / tau);
        let (mut lo, mut hi) = (1e-14f64, 1e14f64);
        for _ in 0..400 {
            let mid = (lo * hi).sqrt();
            if rise(mid) > rho {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi / lo < 1.0 + 1e-15 {
                break;
            }
        }
        Ok(StretchMap { n: nf, rho, floor_slope: c, tau: (lo * hi).sqrt(), linear: false })
    }

    pub fn lambda(&self, y: f64) -> f64 {
        let a = y.abs();
        let v = if self.linear || a <= 1.0 {
            self.n * a
        } else {
            let t = a - 1.0;
            let c = self.floor_slope;
            self.n + c * t + (self.n - c) * self.tau * 0.5 * PI.sqrt() * libm::erf(t / self.tau)
        };
        v.copysign(y)
    }

    pub fn lambda_prime(&self, y: f64) -> f64 {
        let a = y.abs();
        if self.linear || a <= 1.0 {
            self.n
        } else {
            let t = (a - 1.0) / self.tau;
            self.floor_slope + (self.n - self.floor_slope) * (-t * t).exp()
        }
    }

    pub fn lambda_second(&self, y: f64) -> f64 {
        let a = y.abs();
        if self.linear || a <= 1.0 {
            0.0
        } else {
            let t = (a - 1.0) / self.tau;
            let v = -(self.n - self.floor_slope) * 2.0 * t / self.tau * (-t * t).exp();
            if y < 0.0 {
                -v
            } else {
                v
            }
        }
    }

    /// `μ'` at `z = λ(y)`, where `μ = λ⁻¹`.
    pub fn mu_prime(&self, y: f64) -> f64 {
        1.0 / self.lambda_prime(y)
    }

    /// `μ''` at `z = λ(y)`.
    pub fn mu_second(&self, y: f64) -> f64 {
        -self.lambda_second(y) / self.lambda_prime(y).powi(3)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeKind {
    Interior,
    /// On the boundary; carries Dirichlet data.
    Boundary,
    /// Outside the domain; carries the Dirichlet data of the nearby boundary.
    Exterior,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Geometry {
    Interval,
    /// Radial mesh in ℝ^dim; `offset` places nodes at `(i + ½) h`.
    Radial { dim: u32, offset: bool },
    Cartesian,
    /// `(s, y)` mesh of a cylindrically symmetric domain in ℝ^dim.
    Cylindrical { dim: u32 },
}

/// A coupling of the discrete Dirichlet form: `c · (u_a − u_b)²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub conductance: f64,
}

/// A grid edge from an interior node that crosses a curved boundary at
/// distance `distance` along `axis` in direction `sign`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cut {
    pub node: usize,
    pub ghost: usize,
    pub axis: usize,
    pub sign: i8,
    pub distance: f64,
}

/// Structured tensor mesh (1D or 2D) with a node mask and quadrature weights.
#[derive(Clone, Debug)]
pub struct Mesh {
    domain: DomainSpec,
    geometry: Geometry,
    shape: [usize; 2],
    origin: [f64; 2],
    spacing: [f64; 2],
    offset: [bool; 2],
    kinds: Vec<NodeKind>,
    weights: Vec<f64>,
    edges: Vec<Edge>,
    cuts: Vec<Cut>,
    symmetries: Vec<Isometry>,
    stretch: Option<StretchMap>,
    /// `μ_n'` and `μ_n''` per axial row (dumbbell only).
    metric: Option<(Vec<f64>, Vec<f64>)>,
}

/// Serializable summary of a mesh; written as the JSON header of field dumps.
#[derive(Clone, Debug, Serialize)]
pub struct MeshHeader {
    pub domain: DomainSpec,
    pub geometry: Geometry,
    pub shape: [usize; 2],
    pub origin: [f64; 2],
    pub spacing: [f64; 2],
    pub offset: [bool; 2],
    pub nodes: usize,
    pub interior_nodes: usize,
}

impl PartialEq for Mesh {
    fn eq(&self, other: &Self) -> bool {
        self.domain == other.domain
            && self.shape == other.shape
            && self.origin == other.origin
            && self.spacing == other.spacing
            && self.offset == other.offset
    }
}

/// Builds the structured mesh of `domain` with `resolution` cells per axis.
pub fn build_mesh(domain: &DomainSpec, resolution: usize) -> Result<Mesh> {
    if resolution < 4 {
        return Err(Error::InvalidInput(format!("resolution must be ≥ 4, got {resolution}")));
    }
    domain.validate()?;
    let mesh = match *domain {
        DomainSpec::Interval { a, b } => interval_mesh(domain, a, b, resolution),
        DomainSpec::Ball { dim, radius } => ball_mesh(domain, dim, radius, resolution),
        DomainSpec::Annulus { dim, inner, outer } => annulus_mesh(domain, dim, inner, outer, resolution),
        DomainSpec::Box2D { lx, ly } => box_mesh(domain, lx, ly, resolution),
        DomainSpec::Disk2D { radius } => disk_mesh(domain, radius, resolution),
        DomainSpec::Dumbbell { dim, stretch, layer } => {
            dumbbell_mesh(domain, dim, StretchMap::new(stretch, layer)?, resolution)
        }
    };
    Ok(mesh)
}

fn blank(domain: &DomainSpec, geometry: Geometry, shape: [usize; 2], origin: [f64; 2], spacing: [f64; 2], offset: [bool; 2]) -> Mesh {
    let n = shape[0] * shape[1];
    Mesh {
        domain: domain.clone(),
        geometry,
        shape,
        origin,
        spacing,
        offset,
        kinds: vec![NodeKind::Interior; n],
        weights: vec![0.0; n],
        edges: Vec::new(),
        cuts: Vec::new(),
        symmetries: domain.symmetries(),
        stretch: None,
        metric: None,
    }
}

fn interval_mesh(domain: &DomainSpec, a: f64, b: f64, res: usize) -> Mesh {
    let h = (b - a) / res as f64;
    let mut m = blank(domain, Geometry::Interval, [res + 1, 1], [a, 0.0], [h, 0.0], [false, false]);
    for i in 0..=res {
        let end = i == 0 || i == res;
        m.kinds[i] = if end { NodeKind::Boundary } else { NodeKind::Interior };
        m.weights[i] = if end { 0.5 * h } else { h };
    }
    m.edges = (0..res).map(|i| Edge { a: i, b: i + 1, conductance: 1.0 / h }).collect();
    m
}

/// Offset radial grid `r_i = (i + ½) h`, `h = R / (res + ½)`, so the last
/// node sits on `r = R` and no node touches the origin.
fn ball_mesh(domain: &DomainSpec, dim: u32, radius: f64, res: usize) -> Mesh {
    let h = radius / (res as f64 + 0.5);
    let area = unit_sphere_area(dim);
    let p = (dim - 1) as i32;
    let mut m = blank(domain, Geometry::Radial { dim, offset: true }, [res + 1, 1], [0.0, 0.0], [h, 0.0], [true, false]);
    for i in 0..=res {
        let r = (i as f64 + 0.5) * h;
        if i == res {
            m.kinds[i] = NodeKind::Boundary;
            m.weights[i] = area * radius.powi(p) * 0.5 * h;
        } else {
            m.weights[i] = area * r.powi(p) * h;
        }
    }
    m.edges = (0..res)
        .map(|i| {
            let r_mid = (i + 1) as f64 * h;
            Edge { a: i, b: i + 1, conductance: area * r_mid.powi(p) / h }
        })
        .collect();
    m
}

fn annulus_mesh(domain: &DomainSpec, dim: u32, inner: f64, outer: f64, res: usize) -> Mesh {
    let h = (outer - inner) / res as f64;
    let area = unit_sphere_area(dim);
    let p = (dim - 1) as i32;
    let mut m = blank(domain, Geometry::Radial { dim, offset: false }, [res + 1, 1], [inner, 0.0], [h, 0.0], [false, false]);
    for i in 0..=res {
        let r = inner + i as f64 * h;
        let end = i == 0 || i == res;
        m.kinds[i] = if end { NodeKind::Boundary } else { NodeKind::Interior };
        m.weights[i] = area * r.powi(p) * if end { 0.5 * h } else { h };
    }
    m.edges = (0..res)
        .map(|i| {
            let r_mid = inner + (i as f64 + 0.5) * h;
            Edge { a: i, b: i + 1, conductance: area * r_mid.powi(p) / h }
        })
        .collect();
    m
}

fn box_mesh(domain: &DomainSpec, lx: f64, ly: f64, res: usize) -> Mesh {
    let (hx, hy) = (lx / res as f64, ly / res as f64);
    let n = res + 1;
    let mut m = blank(domain, Geometry::Cartesian, [n, n], [0.0, 0.0], [hx, hy], [false, false]);
    let edge_of = |i: usize| i == 0 || i == res;
    for j in 0..n {
        for i in 0..n {
            let k = i + n * j;
            let wx = if edge_of(i) { 0.5 } else { 1.0 };
            let wy = if edge_of(j) { 0.5 } else { 1.0 };
            m.weights[k] = wx * wy * hx * hy;
            if edge_of(i) || edge_of(j) {
                m.kinds[k] = NodeKind::Boundary;
            }
        }
    }
    for j in 0..n {
        for i in 0..n {
            let k = i + n * j;
            if i + 1 < n {
                let half = if edge_of(j) { 0.5 } else { 1.0 };
                m.edges.push(Edge { a: k, b: k + 1, conductance: half * hy / hx });
            }
            if j + 1 < n {
                let half = if edge_of(i) { 0.5 } else { 1.0 };
                m.edges.push(Edge { a: k, b: k + n, conductance: half * hx / hy });
            }
        }
    }
    m
}

/// Square grid over `[-R, R]²` masked by the disk. Grid edges leaving the
/// disk are cut at the circle (Shortley–Weller distances).
fn disk_mesh(domain: &DomainSpec, radius: f64, res: usize) -> Mesh {
    let h = 2.0 * radius / res as f64;
    let n = res + 1;
    let mut m = blank(domain, Geometry::Cartesian, [n, n], [-radius, -radius], [h, h], [false, false]);
    let r2 = radius * radius;
    for k in 0..n * n {
        let p = m.coord(k);
        let d2 = p[0] * p[0] + p[1] * p[1];
        m.kinds[k] = if d2 < r2 * (1.0 - 1e-12) {
            NodeKind::Interior
        } else if d2 <= r2 * (1.0 + 1e-12) {
            NodeKind::Boundary
        } else {
            NodeKind::Exterior
        };
        if m.kinds[k] == NodeKind::Interior {
            m.weights[k] = h * h;
        }
    }
    for j in 0..n {
        for i in 0..n {
            let k = i + n * j;
            if m.kinds[k] != NodeKind::Interior {
                continue;
            }
            let p = m.coord(k);
            for (axis, sign, di, dj) in [(0usize, 1i8, 1i64, 0i64), (0, -1, -1, 0), (1, 1, 0, 1), (1, -1, 0, -1)] {
                let (ni, nj) = (i as i64 + di, j as i64 + dj);
                let nb = ni as usize + n * nj as usize;
                if m.kinds[nb] == NodeKind::Interior {
                    // count each interior edge once
                    if sign > 0 {
                        m.edges.push(Edge { a: k, b: nb, conductance: 1.0 });
                    }
                    continue;
                }
                // distance t along the axis to the circle
                let (x, y) = (p[0], p[1]);
                let along = if axis == 0 { x } else { y };
                let across = if axis == 0 { y } else { x };
                let s = sign as f64;
                let t = ((r2 - across * across).max(0.0).sqrt() - s * along).clamp(1e-9 * h, h);
                m.cuts.push(Cut { node: k, ghost: nb, axis, sign, distance: t });
                m.edges.push(Edge { a: k, b: nb, conductance: h / t });
            }
        }
    }
    m
}

/// `(s, y)` mesh of the dumbbell in unstretched coordinates: offset grid in
/// `s = |x|` with weight `s^{N-2}`, uniform in `y ∈ [-2, 2]`. Axial cell
/// widths are the exact stretched lengths `λ(y_{j+½}) − λ(y_{j−½})`, so the
/// stencil stays faithful when `λ'` varies below the grid scale.
fn dumbbell_mesh(domain: &DomainSpec, dim: u32, stretch: StretchMap, res: usize) -> Mesh {
    let hs = 1.0 / (res as f64 + 0.5);
    let hy = 4.0 / res as f64;
    let (ns, ny) = (res + 1, res + 1);
    let area = unit_sphere_area(dim - 1);
    let p = (dim - 2) as i32;
    let mut m = blank(domain, Geometry::Cylindrical { dim }, [ns, ny], [0.0, -2.0], [hs, hy], [true, false]);
    for j in 0..ny {
        for i in 0..ns {
            let k = i + ns * j;
            let [s, y] = m.coord(k);
            let a = y.abs();
            let inside = i < res
                && j > 0
                && j < ny - 1
                && (a <= 1.0 || s * s + (a - 1.0) * (a - 1.0) < 1.0);
            m.kinds[k] = if inside {
                NodeKind::Interior
            } else if i == res && a <= 1.0 {
                NodeKind::Boundary
            } else {
                NodeKind::Exterior
            };
            if inside {
                m.weights[k] = area * s.powi(p) * stretched_width(&stretch, y, hy) * hs;
            }
        }
    }
    for j in 0..ny {
        for i in 0..ns {
            let k = i + ns * j;
            let [s, y] = m.coord(k);
            if i + 1 < ns {
                let other = k + 1;
                if m.kinds[k] == NodeKind::Interior || m.kinds[other] == NodeKind::Interior {
                    let s_mid = s + 0.5 * hs;
                    let c = area * s_mid.powi(p) * stretched_width(&stretch, y, hy) / hs;
                    m.edges.push(Edge { a: k, b: other, conductance: c });
                }
            }
            if j + 1 < ny {
                let other = k + ns;
                if m.kinds[k] == NodeKind::Interior || m.kinds[other] == NodeKind::Interior {
                    let gap = stretch.lambda(y + hy) - stretch.lambda(y);
                    let c = area * s.powi(p) * hs / gap;
                    m.edges.push(Edge { a: k, b: other, conductance: c });
                }
            }
        }
    }
    let ys: Vec<f64> = (0..ny).map(|j| -2.0 + j as f64 * hy).collect();
    m.metric = Some((
        ys.iter().map(|&y| stretch.mu_prime(y)).collect(),
        ys.iter().map(|&y| stretch.mu_second(y)).collect(),
    ));
    m.stretch = Some(stretch);
    m
}

fn stretched_width(stretch: &StretchMap, y: f64, hy: f64) -> f64 {
    stretch.lambda(y + 0.5 * hy) - stretch.lambda(y - 0.5 * hy)
}

impl Mesh {
    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    pub fn shape(&self) -> [usize; 2] {
        self.shape
    }

    pub fn spacing(&self) -> [f64; 2] {
        self.spacing
    }

    /// Largest grid spacing.
    pub fn h(&self) -> f64 {
        self.spacing[0].max(self.spacing[1])
    }

    pub fn is_1d(&self) -> bool {
        self.shape[1] == 1
    }

    pub fn kinds(&self) -> &[NodeKind] {
        &self.kinds
    }

    pub fn kind(&self, node: usize) -> NodeKind {
        self.kinds[node]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn cuts(&self) -> &[Cut] {
        &self.cuts
    }

    pub fn symmetries(&self) -> &[Isometry] {
        &self.symmetries
    }

    pub fn stretch(&self) -> Option<&StretchMap> {
        self.stretch.as_ref()
    }

    /// `(μ_n', μ_n'')` per axial grid row of a dumbbell mesh.
    pub fn metric(&self) -> Option<(&[f64], &[f64])> {
        self.metric.as_ref().map(|(a, b)| (a.as_slice(), b.as_slice()))
    }

    pub fn interior_count(&self) -> usize {
        self.kinds.iter().filter(|k| **k == NodeKind::Interior).count()
    }

    pub fn grid_index(&self, node: usize) -> (usize, usize) {
        (node % self.shape[0], node / self.shape[0])
    }

    pub fn node_at(&self, i: usize, j: usize) -> usize {
        i + self.shape[0] * j
    }

    pub fn coord(&self, node: usize) -> [f64; 2] {
        let (i, j) = self.grid_index(node);
        let off = |axis: usize| if self.offset[axis] { 0.5 } else { 0.0 };
        [
            self.origin[0] + (i as f64 + off(0)) * self.spacing[0],
            self.origin[1] + (j as f64 + off(1)) * self.spacing[1],
        ]
    }

    pub fn header(&self) -> MeshHeader {
        MeshHeader {
            domain: self.domain.clone(),
            geometry: self.geometry,
            shape: self.shape,
            origin: self.origin,
            spacing: self.spacing,
            offset: self.offset,
            nodes: self.len(),
            interior_nodes: self.interior_count(),
        }
    }

    /// Continuous grid coordinates of a point, `None` outside the grid box.
    pub(crate) fn locate(&self, p: [f64; 2]) -> Option<[f64; 2]> {
        let mut out = [0.0; 2];
        let axes = if self.is_1d() { 1 } else { 2 };
        for axis in 0..axes {
            let off = if self.offset[axis] { 0.5 } else { 0.0 };
            let g = (p[axis] - self.origin[axis]) / self.spacing[axis] - off;
            let max = (self.shape[axis] - 1) as f64;
            let tol = 1e-9;
            if g < -tol || g > max + tol {
                return None;
            }
            out[axis] = g.clamp(0.0, max);
        }
        Some(out)
    }

    /// Physical distance to the boundary of the stretched dumbbell, or the
    /// Euclidean distance to the boundary for the other domains.
    pub fn boundary_distance(&self, node: usize) -> f64 {
        let p = self.coord(node);
        match self.domain {
            DomainSpec::Interval { a, b } => (p[0] - a).min(b - p[0]),
            DomainSpec::Ball { radius, .. } => radius - p[0],
            DomainSpec::Annulus { inner, outer, .. } => (p[0] - inner).min(outer - p[0]),
            DomainSpec::Box2D { lx, ly } => p[0].min(lx - p[0]).min(p[1]).min(ly - p[1]),
            DomainSpec::Disk2D { radius } => radius - (p[0] * p[0] + p[1] * p[1]).sqrt(),
            DomainSpec::Dumbbell { .. } => {
                let stretch = self.stretch.as_ref().expect("dumbbell mesh carries its stretch");
                dumbbell_profile_distance(stretch, p[0], stretch.lambda(p[1]))
            }
        }
    }
}

/// Distance in the meridian half-plane from `(s, z)` to the profile of the
/// stretched dumbbell boundary.
fn dumbbell_profile_distance(stretch: &StretchMap, s: f64, z: f64) -> f64 {
    let n = stretch.n;
    // lateral wall s = 1, |z| ≤ n
    let zc = z.abs().min(n);
    let mut best = ((s - 1.0).powi(2) + (z.abs() - zc).powi(2)).sqrt();
    // caps: (sqrt(1 − t²), λ(1 + t)), t ∈ [0, 1]; sampled then refined locally
    let za = z.abs();
    let samples = 512;
    let point = |t: f64| ((1.0 - t * t).max(0.0).sqrt(), stretch.lambda(1.0 + t));
    let dist = |t: f64| {
        let (ps, pz) = point(t);
        ((s - ps).powi(2) + (za - pz).powi(2)).sqrt()
    };
    let mut t_best = 0.0;
    for i in 0..=samples {
        let t = i as f64 / samples as f64;
        let d = dist(t);
        if d < best {
            best = d;
            t_best = t;
        }
    }
    let step = 1.0 / samples as f64;
    let (_, refined) = crate::discretization::quadrature::scan_golden_min(
        &dist,
        (t_best - step).max(0.0),
        (t_best + step).min(1.0),
        8,
    );
    best.min(refined)
}
