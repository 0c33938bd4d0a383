//! Domains, fitted grids and boundary samplings.
//!
//! Every domain is analytic: a disk gets a polar grid whose outer ring lies on
//! the circle, a rectangle gets a Cartesian grid whose outer nodes lie on the
//! edges, and an n-ball is represented by its radial profile on `[0, R]`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum accepted grid resolution.
pub const MIN_RESOLUTION: usize = 8;

/// Analytic description of the domain Ω.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum DomainKind {
    Disk2d { radius: f64 },
    Rectangle2d { width: f64, height: f64 },
    RadialBall { dimension: usize, radius: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub kind: DomainKind,
    pub center: Vec<f64>,
}

impl DomainSpec {
    pub fn disk(radius: f64) -> Self {
        DomainSpec {
            kind: DomainKind::Disk2d { radius },
            center: vec![0.0, 0.0],
        }
    }

    /// Rectangle centered at the origin.
    pub fn rectangle(width: f64, height: f64) -> Self {
        DomainSpec {
            kind: DomainKind::Rectangle2d { width, height },
            center: vec![0.0, 0.0],
        }
    }

    pub fn ball(dimension: usize, radius: f64) -> Self {
        DomainSpec {
            kind: DomainKind::RadialBall { dimension, radius },
            center: vec![0.0; dimension.max(1)],
        }
    }

    pub fn with_center(mut self, center: Vec<f64>) -> Self {
        self.center = center;
        self
    }

    /// Ambient dimension n.
    pub fn dimension(&self) -> usize {
        match self.kind {
            DomainKind::Disk2d { .. } | DomainKind::Rectangle2d { .. } => 2,
            DomainKind::RadialBall { dimension, .. } => dimension,
        }
    }

    pub fn is_ball(&self) -> bool {
        !matches!(self.kind, DomainKind::Rectangle2d { .. })
    }

    /// Radius for disks and balls.
    pub fn radius(&self) -> Option<f64> {
        match self.kind {
            DomainKind::Disk2d { radius } | DomainKind::RadialBall { radius, .. } => Some(radius),
            DomainKind::Rectangle2d { .. } => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidDomain(format!("{name} must be positive, got {v}")))
            }
        };
        match self.kind {
            DomainKind::Disk2d { radius } => positive("radius", radius)?,
            DomainKind::Rectangle2d { width, height } => {
                positive("width", width)?;
                positive("height", height)?;
            }
            DomainKind::RadialBall { dimension, radius } => {
                if dimension < 2 {
                    return Err(Error::InvalidDomain(format!(
                        "dimension must be at least 2, got {dimension}"
                    )));
                }
                positive("radius", radius)?;
            }
        }
        if self.center.len() != self.dimension() {
            return Err(Error::InvalidDomain(format!(
                "center has {} coordinates, domain is {}-dimensional",
                self.center.len(),
                self.dimension()
            )));
        }
        if self.center.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidDomain("center must be finite".into()));
        }
        Ok(())
    }
}

impl fmt::Display for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            DomainKind::Disk2d { radius } => write!(f, "disk2d(r={radius})"),
            DomainKind::Rectangle2d { width, height } => {
                write!(f, "rectangle2d({width}x{height})")
            }
            DomainKind::RadialBall { dimension, radius } => {
                write!(f, "radial_ball(n={dimension},r={radius})")
            }
        }
    }
}

/// Short form used on the command line: `disk[:R]`, `rect[:W[xH]]`,
/// `square` or `ball:N[:R]`.
impl std::str::FromStr for DomainSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidDomain(format!("cannot parse `{s}` (expected disk[:R], rect[:W[xH]] or ball:N[:R])"));
        let num = |v: &str| v.parse::<f64>().map_err(|_| bad());
        let int = |v: &str| v.parse::<usize>().map_err(|_| bad());
        let spec = match s.split(':').collect::<Vec<_>>().as_slice() {
            ["disk"] => DomainSpec::disk(1.0),
            ["disk", r] => DomainSpec::disk(num(r)?),
            ["rect"] | ["square"] => DomainSpec::rectangle(1.0, 1.0),
            ["rect", wh] => match wh.split_once('x') {
                Some((w, h)) => DomainSpec::rectangle(num(w)?, num(h)?),
                None => DomainSpec::rectangle(num(wh)?, num(wh)?),
            },
            ["ball", n] => DomainSpec::ball(int(n)?, 1.0),
            ["ball", n, r] => DomainSpec::ball(int(n)?, num(r)?),
            _ => return Err(bad()),
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Closed-form measures of a domain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measures {
    pub volume: f64,
    pub perimeter: f64,
    pub diameter: f64,
    pub unit_ball_volume: f64,
}

/// |B₁| in ℝⁿ, via the two-step recursion |B₁(n)| = 2π/n · |B₁(n−2)|.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * PI / n as f64 * unit_ball_volume(n - 2),
    }
}

pub fn measures(spec: &DomainSpec) -> Measures {
    let n = spec.dimension();
    let b1 = unit_ball_volume(n);
    match spec.kind {
        DomainKind::Disk2d { radius } => Measures {
            volume: PI * radius * radius,
            perimeter: 2.0 * PI * radius,
            diameter: 2.0 * radius,
            unit_ball_volume: b1,
        },
        DomainKind::Rectangle2d { width, height } => Measures {
            volume: width * height,
            perimeter: 2.0 * (width + height),
            diameter: width.hypot(height),
            unit_ball_volume: b1,
        },
        DomainKind::RadialBall { dimension, radius } => Measures {
            volume: b1 * radius.powi(dimension as i32),
            perimeter: dimension as f64 * b1 * radius.powi(dimension as i32 - 1),
            diameter: 2.0 * radius,
            unit_ball_volume: b1,
        },
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeClass {
    Interior,
    Boundary,
}

/// Layout of a fitted grid.
#[derive(Clone, Debug, PartialEq)]
pub enum GridKind {
    /// `nx * ny` nodes, index `i + j * nx`.
    Cartesian2d {
        nx: usize,
        ny: usize,
        hx: f64,
        hy: f64,
    },
    /// Node 0 is the center, ring `i` (1..=nr) angle `j` is `1 + (i-1)*ntheta + j`.
    Polar2d {
        nr: usize,
        ntheta: usize,
        hr: f64,
        htheta: f64,
    },
    /// Nodes at `r_i = i*hr` along the first coordinate axis.
    Radial1d { nr: usize, hr: f64 },
}

/// Boundary points with outward normals and arc-length quadrature weights.
///
/// The inward stencil of a sample holds the two grid nodes at distance `step`
/// and `2*step` along `-normal`. Rectangle corners appear once per adjacent
/// edge with that edge's normal and half weight, and are flagged so boundary
/// infima skip them.
#[derive(Clone, Debug)]
pub struct BoundarySampling {
    dim: usize,
    points: Vec<f64>,
    normals: Vec<f64>,
    weights: Vec<f64>,
    nodes: Vec<usize>,
    stencils: Vec<Option<[usize; 2]>>,
    steps: Vec<f64>,
    corner: Vec<bool>,
}

impl BoundarySampling {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, k: usize) -> &[f64] {
        &self.points[k * self.dim..(k + 1) * self.dim]
    }

    pub fn normal(&self, k: usize) -> &[f64] {
        &self.normals[k * self.dim..(k + 1) * self.dim]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Grid node coinciding with sample `k`.
    pub fn node(&self, k: usize) -> usize {
        self.nodes[k]
    }

    pub fn stencil(&self, k: usize) -> Option<([usize; 2], f64)> {
        self.stencils[k].map(|s| (s, self.steps[k]))
    }

    pub fn is_corner(&self, k: usize) -> bool {
        self.corner[k]
    }

    /// Samples that take part in boundary infima.
    pub fn edge_samples(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&k| !self.corner[k])
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    fn push(&mut self, point: &[f64], normal: &[f64], weight: f64, node: usize, stencil: Option<[usize; 2]>, step: f64, corner: bool) {
        self.points.extend_from_slice(point);
        self.normals.extend_from_slice(normal);
        self.weights.push(weight);
        self.nodes.push(node);
        self.stencils.push(stencil);
        self.steps.push(step);
        self.corner.push(corner);
    }

    fn new(dim: usize) -> Self {
        BoundarySampling {
            dim,
            points: Vec::new(),
            normals: Vec::new(),
            weights: Vec::new(),
            nodes: Vec::new(),
            stencils: Vec::new(),
            steps: Vec::new(),
            corner: Vec::new(),
        }
    }
}

/// A discretized domain. Immutable once built.
#[derive(Clone, Debug)]
pub struct Grid {
    spec: DomainSpec,
    kind: GridKind,
    resolution: usize,
    dim: usize,
    coords: Vec<f64>,
    class: Vec<NodeClass>,
    volumes: Vec<f64>,
    boundary: Arc<BoundarySampling>,
}

impl Grid {
    pub fn spec(&self) -> &DomainSpec {
        &self.spec
    }

    pub fn kind(&self) -> &GridKind {
        &self.kind
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn len(&self) -> usize {
        self.class.len()
    }

    pub fn is_empty(&self) -> bool {
        self.class.is_empty()
    }

    /// Ambient dimension of node coordinates.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn class(&self, i: usize) -> NodeClass {
        self.class[i]
    }

    pub fn is_boundary(&self, i: usize) -> bool {
        self.class[i] == NodeClass::Boundary
    }

    pub fn interior_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&i| !self.is_boundary(i))
    }

    /// Dual-cell volume of node `i`; the volumes sum to |Ω|.
    pub fn volume(&self, i: usize) -> f64 {
        self.volumes[i]
    }

    pub fn volumes(&self) -> &[f64] {
        &self.volumes
    }

    pub fn boundary(&self) -> &Arc<BoundarySampling> {
        &self.boundary
    }

    /// Characteristic spacing h: the radial step for polar and radial grids,
    /// the larger axis step for Cartesian grids.
    pub fn spacing(&self) -> f64 {
        match self.kind {
            GridKind::Cartesian2d { hx, hy, .. } => hx.max(hy),
            GridKind::Polar2d { hr, .. } | GridKind::Radial1d { hr, .. } => hr,
        }
    }

    /// Largest diagonal of a grid cell.
    pub fn max_cell_diagonal(&self) -> f64 {
        match self.kind {
            GridKind::Cartesian2d { hx, hy, .. } => hx.hypot(hy),
            GridKind::Polar2d { hr, htheta, .. } => {
                let radius = self.spec.radius().unwrap_or(1.0);
                hr.hypot(radius * htheta)
            }
            GridKind::Radial1d { hr, .. } => hr,
        }
    }

    /// Node coordinates relative to the domain center.
    pub fn local(&self, i: usize) -> Vec<f64> {
        self.point(i)
            .iter()
            .zip(&self.spec.center)
            .map(|(x, c)| x - c)
            .collect()
    }

    /// Distance of node `i` from the domain center (radial and polar grids).
    pub fn radius_of(&self, i: usize) -> f64 {
        match self.kind {
            GridKind::Radial1d { hr, .. } => i as f64 * hr,
            GridKind::Polar2d { ntheta, hr, .. } => {
                if i == 0 {
                    0.0
                } else {
                    ((i - 1) / ntheta + 1) as f64 * hr
                }
            }
            GridKind::Cartesian2d { .. } => self.local(i).iter().map(|x| x * x).sum::<f64>().sqrt(),
        }
    }

    /// Polar node index for ring `ring` (0 = center) and angle `j`.
    pub fn polar_index(&self, ring: usize, j: usize) -> usize {
        match self.kind {
            GridKind::Polar2d { ntheta, .. } => {
                if ring == 0 {
                    0
                } else {
                    1 + (ring - 1) * ntheta + (j % ntheta)
                }
            }
            _ => panic!("polar_index on a non-polar grid"),
        }
    }
}

/// Angular node count used for a polar grid of the given radial resolution.
pub fn polar_angles(resolution: usize) -> usize {
    (resolution.div_ceil(8) * 8).max(16)
}

/// Builds a fitted grid and its boundary sampling.
pub fn make_domain(spec: &DomainSpec, resolution: usize) -> Result<(Arc<Grid>, Arc<BoundarySampling>)> {
    spec.validate()?;
    if resolution < MIN_RESOLUTION {
        return Err(Error::InvalidArgument(format!(
            "resolution must be at least {MIN_RESOLUTION}, got {resolution}"
        )));
    }
    let grid = match spec.kind {
        DomainKind::Disk2d { radius } => polar_grid(spec, radius, resolution),
        DomainKind::Rectangle2d { width, height } => cartesian_grid(spec, width, height, resolution),
        DomainKind::RadialBall { dimension, radius } => radial_grid(spec, dimension, radius, resolution),
    };
    let grid = Arc::new(grid);
    let boundary = grid.boundary.clone();
    Ok((grid, boundary))
}

fn polar_grid(spec: &DomainSpec, radius: f64, nr: usize) -> Grid {
    let ntheta = polar_angles(nr);
    let hr = radius / nr as f64;
    let htheta = 2.0 * PI / ntheta as f64;
    let (cx, cy) = (spec.center[0], spec.center[1]);
    let count = 1 + nr * ntheta;
    let mut coords = Vec::with_capacity(2 * count);
    let mut class = Vec::with_capacity(count);
    let mut volumes = Vec::with_capacity(count);
    coords.extend_from_slice(&[cx, cy]);
    class.push(NodeClass::Interior);
    volumes.push(PI * 0.25 * hr * hr);
    for ring in 1..=nr {
        let r = ring as f64 * hr;
        let (inner, outer) = (r - 0.5 * hr, (r + 0.5 * hr).min(radius));
        let vol = 0.5 * (outer * outer - inner * inner) * htheta;
        for j in 0..ntheta {
            let theta = j as f64 * htheta;
            let (s, c) = theta.sin_cos();
            let (x, y) = if ring == nr { (radius * c, radius * s) } else { (r * c, r * s) };
            coords.extend_from_slice(&[cx + x, cy + y]);
            class.push(if ring == nr { NodeClass::Boundary } else { NodeClass::Interior });
            volumes.push(vol);
        }
    }
    let kind = GridKind::Polar2d { nr, ntheta, hr, htheta };
    let mut boundary = BoundarySampling::new(2);
    for j in 0..ntheta {
        let theta = j as f64 * htheta;
        let (s, c) = theta.sin_cos();
        let node = 1 + (nr - 1) * ntheta + j;
        let inner1 = 1 + (nr - 2) * ntheta + j;
        let inner2 = if nr >= 3 { 1 + (nr - 3) * ntheta + j } else { 0 };
        boundary.push(
            &[cx + radius * c, cy + radius * s],
            &[c, s],
            radius * htheta,
            node,
            Some([inner1, inner2]),
            hr,
            false,
        );
    }
    Grid {
        spec: spec.clone(),
        kind,
        resolution: nr,
        dim: 2,
        coords,
        class,
        volumes,
        boundary: Arc::new(boundary),
    }
}

fn cartesian_grid(spec: &DomainSpec, width: f64, height: f64, resolution: usize) -> Grid {
    let h = width.min(height) / resolution as f64;
    let cells_x = ((width / h).round() as usize).max(resolution);
    let cells_y = ((height / h).round() as usize).max(resolution);
    let (nx, ny) = (cells_x + 1, cells_y + 1);
    let (hx, hy) = (width / cells_x as f64, height / cells_y as f64);
    let (x0, y0) = (spec.center[0] - 0.5 * width, spec.center[1] - 0.5 * height);
    let mut coords = Vec::with_capacity(2 * nx * ny);
    let mut class = Vec::with_capacity(nx * ny);
    let mut volumes = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let x = if i == cells_x { x0 + width } else { x0 + i as f64 * hx };
            let y = if j == cells_y { y0 + height } else { y0 + j as f64 * hy };
            coords.extend_from_slice(&[x, y]);
            let edge_x = i == 0 || i == cells_x;
            let edge_y = j == 0 || j == cells_y;
            class.push(if edge_x || edge_y { NodeClass::Boundary } else { NodeClass::Interior });
            let wx = if edge_x { 0.5 } else { 1.0 };
            let wy = if edge_y { 0.5 } else { 1.0 };
            volumes.push(wx * wy * hx * hy);
        }
    }
    let idx = |i: usize, j: usize| i + j * nx;
    let mut boundary = BoundarySampling::new(2);
    // Bottom, right, top, left; endpoints of each edge are corner samples.
    for i in 0..nx {
        let corner = i == 0 || i == cells_x;
        let w = if corner { 0.5 * hx } else { hx };
        let x = coords[2 * idx(i, 0)];
        boundary.push(&[x, y0], &[0.0, -1.0], w, idx(i, 0), Some([idx(i, 1), idx(i, 2)]), hy, corner);
    }
    for j in 0..ny {
        let corner = j == 0 || j == cells_y;
        let w = if corner { 0.5 * hy } else { hy };
        let y = coords[2 * idx(0, j) + 1];
        boundary.push(
            &[x0 + width, y],
            &[1.0, 0.0],
            w,
            idx(cells_x, j),
            Some([idx(cells_x - 1, j), idx(cells_x - 2, j)]),
            hx,
            corner,
        );
    }
    for i in 0..nx {
        let corner = i == 0 || i == cells_x;
        let w = if corner { 0.5 * hx } else { hx };
        let x = coords[2 * idx(i, 0)];
        boundary.push(
            &[x, y0 + height],
            &[0.0, 1.0],
            w,
            idx(i, cells_y),
            Some([idx(i, cells_y - 1), idx(i, cells_y - 2)]),
            hy,
            corner,
        );
    }
    for j in 0..ny {
        let corner = j == 0 || j == cells_y;
        let w = if corner { 0.5 * hy } else { hy };
        let y = coords[2 * idx(0, j) + 1];
        boundary.push(&[x0, y], &[-1.0, 0.0], w, idx(0, j), Some([idx(1, j), idx(2, j)]), hx, corner);
    }
    Grid {
        spec: spec.clone(),
        kind: GridKind::Cartesian2d { nx, ny, hx, hy },
        resolution,
        dim: 2,
        coords,
        class,
        volumes,
        boundary: Arc::new(boundary),
    }
}

fn radial_grid(spec: &DomainSpec, dim: usize, radius: f64, nr: usize) -> Grid {
    let hr = radius / nr as f64;
    let b1 = unit_ball_volume(dim);
    let shell = |a: f64, b: f64| b1 * (b.powi(dim as i32) - a.powi(dim as i32));
    let mut coords = Vec::with_capacity(dim * (nr + 1));
    let mut class = Vec::with_capacity(nr + 1);
    let mut volumes = Vec::with_capacity(nr + 1);
    for i in 0..=nr {
        let r = if i == nr { radius } else { i as f64 * hr };
        let mut p = spec.center.clone();
        p[0] += r;
        coords.extend_from_slice(&p);
        class.push(if i == nr { NodeClass::Boundary } else { NodeClass::Interior });
        let lo = (r - 0.5 * hr).max(0.0);
        let hi = (r + 0.5 * hr).min(radius);
        volumes.push(shell(lo, hi));
    }
    let mut boundary = BoundarySampling::new(dim);
    let mut normal = vec![0.0; dim];
    normal[0] = 1.0;
    let mut p = spec.center.clone();
    p[0] += radius;
    boundary.push(
        &p,
        &normal,
        dim as f64 * b1 * radius.powi(dim as i32 - 1),
        nr,
        Some([nr - 1, nr - 2]),
        hr,
        false,
    );
    Grid {
        spec: spec.clone(),
        kind: GridKind::Radial1d { nr, hr },
        resolution: nr,
        dim,
        coords,
        class,
        volumes,
        boundary: Arc::new(boundary),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn short_domain_syntax() {
        assert_eq!("disk".parse::<DomainSpec>().unwrap(), DomainSpec::disk(1.0));
        assert_eq!("disk:2.5".parse::<DomainSpec>().unwrap(), DomainSpec::disk(2.5));
        assert_eq!("rect:2x3".parse::<DomainSpec>().unwrap(), DomainSpec::rectangle(2.0, 3.0));
        assert_eq!("rect:2".parse::<DomainSpec>().unwrap(), DomainSpec::rectangle(2.0, 2.0));
        assert_eq!("ball:3:0.5".parse::<DomainSpec>().unwrap(), DomainSpec::ball(3, 0.5));
        for bad in ["torus", "disk:-1", "ball:x", "rect:1x", "disk:1:2"] {
            assert!(bad.parse::<DomainSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn construction_examples() {
        let (g, b) = make_domain(&DomainSpec::disk(1.0), 64).unwrap();
        assert!(matches!(g.kind(), GridKind::Polar2d { nr: 64, .. }));
        assert_eq!(b.len(), polar_angles(64));
        for k in 0..b.len() {
            let p = b.point(k);
            assert!((p[0].hypot(p[1]) - 1.0).abs() < 1e-12);
        }

        let (g, _) = make_domain(&DomainSpec::rectangle(1.0, 1.0), 64).unwrap();
        assert_eq!(g.len(), 65 * 65);
        assert_relative_eq!(g.spacing(), 1.0 / 64.0);

        let (g, _) = make_domain(&DomainSpec::ball(3, 1.0), 512).unwrap();
        assert_eq!(g.len(), 513);
        assert_eq!(g.point(512)[0], 1.0);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(make_domain(&DomainSpec::disk(0.0), 64).is_err());
        assert!(make_domain(&DomainSpec::rectangle(1.0, -2.0), 64).is_err());
        assert!(make_domain(&DomainSpec::ball(1, 1.0), 64).is_err());
        assert!(make_domain(&DomainSpec::disk(1.0), 4).is_err());
    }

    #[test]
    fn measure_examples() {
        let m = measures(&DomainSpec::disk(1.0));
        assert_relative_eq!(m.volume, PI);
        assert_relative_eq!(m.perimeter, 2.0 * PI);
        assert_relative_eq!(m.diameter, 2.0);
        assert_relative_eq!(m.unit_ball_volume, PI);
        let m = measures(&DomainSpec::ball(3, 1.0));
        assert_relative_eq!(m.volume, 4.0 * PI / 3.0);
        assert_relative_eq!(m.unit_ball_volume, 4.0 * PI / 3.0);
        let m = measures(&DomainSpec::rectangle(2.0, 1.0));
        assert_relative_eq!(m.volume, 2.0);
        assert_relative_eq!(m.perimeter, 6.0);
        assert_relative_eq!(m.diameter, 5f64.sqrt());
    }

    #[test]
    fn sphere_area_matches_gamma_closed_form() {
        use statrs::function::gamma::gamma;
        for n in 2..=6 {
            let nf = n as f64;
            let sphere = 2.0 * PI.powf(nf / 2.0) / gamma(nf / 2.0);
            assert_relative_eq!(nf * unit_ball_volume(n), sphere, max_relative = 1e-12);
            assert_relative_eq!(unit_ball_volume(n), PI.powf(nf / 2.0) / gamma(nf / 2.0 + 1.0), max_relative = 1e-12);
        }
    }

    #[test]
    fn boundary_weights_and_volumes() {
        for spec in [
            DomainSpec::disk(1.3),
            DomainSpec::rectangle(2.0, 1.0),
            DomainSpec::ball(3, 0.7),
            DomainSpec::disk(1.0).with_center(vec![0.3, -0.2]),
        ] {
            for res in [16, 33, 64] {
                let (g, b) = make_domain(&spec, res).unwrap();
                let m = measures(&spec);
                assert!((b.total_weight() - m.perimeter).abs() < 1e-10, "{spec} {res}");
                let vol: f64 = g.volumes().iter().sum();
                assert!((vol - m.volume).abs() < 1e-10, "{spec} {res}");
                for k in 0..b.len() {
                    let nrm: f64 = b.normal(k).iter().map(|v| v * v).sum::<f64>().sqrt();
                    assert!((nrm - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn boundary_nodes_on_boundary() {
        let spec = DomainSpec::rectangle(2.0, 1.0);
        let (g, _) = make_domain(&spec, 20).unwrap();
        for i in 0..g.len() {
            let p = g.point(i);
            let on_edge = (p[0].abs() - 1.0).abs() < 1e-12 || (p[1].abs() - 0.5).abs() < 1e-12;
            assert_eq!(on_edge, g.is_boundary(i));
            assert!(p[0].abs() <= 1.0 + 1e-12 && p[1].abs() <= 0.5 + 1e-12);
        }
        let (g, _) = make_domain(&DomainSpec::disk(1.0), 24).unwrap();
        for i in 0..g.len() {
            let r = g.point(i)[0].hypot(g.point(i)[1]);
            if g.is_boundary(i) {
                assert!((r - 1.0).abs() < 1e-12);
            } else {
                assert!(r < 1.0);
            }
        }
    }
}
