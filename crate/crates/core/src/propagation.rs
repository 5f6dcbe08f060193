//! Per-element path sets and near-field / far-field channel construction.
//!
//! Every array element gets its own line-of-sight indicator and its own set
//! of single-bounce reflections, so a surface may block or reflect the
//! signal for only part of the aperture. The far-field baseline evaluates
//! the same indicators once at the array centroid and applies planar
//! wavefront phases.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::geometry::{self, GeometryError, Point, Segment, EPS_GEOM};
use crate::signal::OfdmConfig;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PropagationError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("reflection coefficient {0} is outside [0, 1]")]
    InvalidBeta(f64),
    #[error("relative permittivity {0} must be >= 1")]
    InvalidPermittivity(f64),
    #[error("surface ids must be 0..S-1 in order; found id {found} at position {position}")]
    BadSurfaceId { position: usize, found: usize },
    #[error("surface id {id} does not exist (environment has {total} surfaces)")]
    UnknownSurface { id: usize, total: usize },
    #[error("array must contain at least one element")]
    EmptyArray,
    #[error("array elements {0} and {1} coincide")]
    DuplicateElement(usize, usize),
    #[error("path length must be positive, got {0} m")]
    NonPositiveDistance(f64),
    #[error("wavelength must be positive, got {0} m")]
    NonPositiveWavelength(f64),
}

/// Surface reflectivity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReflectModel {
    /// Angle-independent magnitude.
    ConstantBeta(f64),
    /// Fresnel magnitude for perpendicular (TE) polarization.
    Fresnel { eps_r: f64 },
}

impl ReflectModel {
    fn validate(&self) -> Result<(), PropagationError> {
        match *self {
            ReflectModel::ConstantBeta(beta) if !(0.0..=1.0).contains(&beta) => Err(PropagationError::InvalidBeta(beta)),
            ReflectModel::Fresnel { eps_r } if !(eps_r >= 1.0 && eps_r.is_finite()) => {
                Err(PropagationError::InvalidPermittivity(eps_r))
            }
            _ => Ok(()),
        }
    }
}

/// Reflection coefficient magnitude at incidence angle `theta_i` (radians
/// from the surface normal).
pub fn reflection_coefficient(model: &ReflectModel, theta_i: f64) -> f64 {
    match *model {
        ReflectModel::ConstantBeta(beta) => beta,
        ReflectModel::Fresnel { eps_r } => {
            let (sin, cos) = theta_i.sin_cos();
            let root = (eps_r - sin * sin).max(0.0).sqrt();
            let denom = cos + root;
            if denom == 0.0 {
                return 1.0;
            }
            ((cos - root) / denom).abs().clamp(0.0, 1.0)
        }
    }
}

/// Free-space path loss `(4π d / λ)^2`.
pub fn path_loss(distance: f64, wavelength: f64) -> Result<f64, PropagationError> {
    if !(distance > 0.0) {
        return Err(PropagationError::NonPositiveDistance(distance));
    }
    if !(wavelength > 0.0) {
        return Err(PropagationError::NonPositiveWavelength(wavelength));
    }
    Ok((4.0 * PI * distance / wavelength).powi(2))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Surface {
    id: usize,
    geom: Segment,
    model: ReflectModel,
}

impl Surface {
    pub fn new(id: usize, geom: Segment, model: ReflectModel) -> Result<Self, PropagationError> {
        model.validate()?;
        Ok(Surface { id, geom, model })
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn geom(&self) -> &Segment {
        &self.geom
    }

    pub fn model(&self) -> &ReflectModel {
        &self.model
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Environment {
    surfaces: Vec<Surface>,
}

impl Environment {
    pub fn new(surfaces: Vec<Surface>) -> Result<Self, PropagationError> {
        for (position, s) in surfaces.iter().enumerate() {
            if s.id != position {
                return Err(PropagationError::BadSurfaceId { position, found: s.id });
            }
        }
        Ok(Environment { surfaces })
    }

    pub fn surfaces(&self) -> &[Surface] {
        &self.surfaces
    }

    pub fn len(&self) -> usize {
        self.surfaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.surfaces.is_empty()
    }

    /// The surfaces listed in `awareness`, in id order.
    pub fn known_surfaces(&self, awareness: &AwarenessSet) -> Vec<Surface> {
        awareness.known_ids.iter().map(|&id| self.surfaces[id]).collect()
    }
}

/// Ids of the surfaces whose geometry the tracker knows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AwarenessSet {
    known_ids: Vec<usize>,
    total: usize,
}

impl AwarenessSet {
    pub fn new(mut known_ids: Vec<usize>, total: usize) -> Result<Self, PropagationError> {
        known_ids.sort_unstable();
        known_ids.dedup();
        if let Some(&id) = known_ids.iter().find(|&&id| id >= total) {
            return Err(PropagationError::UnknownSurface { id, total });
        }
        Ok(AwarenessSet { known_ids, total })
    }

    pub fn full(total: usize) -> Self {
        AwarenessSet { known_ids: (0..total).collect(), total }
    }

    pub fn empty(total: usize) -> Self {
        AwarenessSet { known_ids: Vec::new(), total }
    }

    pub fn known_ids(&self) -> &[usize] {
        &self.known_ids
    }

    pub fn total(&self) -> usize {
        self.total
    }

    /// Awareness level `S_a / S`; an empty environment counts as fully known.
    pub fn eta(&self) -> f64 {
        if self.total == 0 {
            1.0
        } else {
            self.known_ids.len() as f64 / self.total as f64
        }
    }

    pub fn contains(&self, id: usize) -> bool {
        self.known_ids.binary_search(&id).is_ok()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry {
    elements: Vec<Point>,
}

impl ArrayGeometry {
    pub fn new(elements: Vec<Point>) -> Result<Self, PropagationError> {
        if elements.is_empty() {
            return Err(PropagationError::EmptyArray);
        }
        for (i, p) in elements.iter().enumerate() {
            if !p.is_finite() {
                return Err(GeometryError::NonFinite { x: p.x, y: p.y }.into());
            }
            if let Some(j) = elements[..i].iter().position(|q| q.distance(*p) <= EPS_GEOM) {
                return Err(PropagationError::DuplicateElement(j, i));
            }
        }
        Ok(ArrayGeometry { elements })
    }

    /// Uniform linear array centered on `center` whose axis points along
    /// `axis_angle` (radians from +x).
    pub fn uniform_linear(center: Point, spacing: f64, n: usize, axis_angle: f64) -> Result<Self, PropagationError> {
        let axis = Point::new(axis_angle.cos(), axis_angle.sin());
        let mid = (n as f64 - 1.0) / 2.0;
        Self::new((0..n).map(|i| center + axis * ((i as f64 - mid) * spacing)).collect())
    }

    pub fn elements(&self) -> &[Point] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn centroid(&self) -> Point {
        let sum = self.elements.iter().fold(Point::default(), |acc, &p| acc + p);
        sum * (1.0 / self.elements.len() as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PathKind {
    Los,
    Nlos { surface_id: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathRecord {
    pub kind: PathKind,
    pub refl_pt: Option<Point>,
    /// Total propagation length (m).
    pub distance: f64,
    /// Reflection coefficient magnitude; 1 for the direct path. Both
    /// reflectivity models are frequency-flat so one value serves every
    /// subcarrier.
    pub beta: f64,
}

/// Valid propagation paths for every array element.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PathSet {
    pub per_element: Vec<Vec<PathRecord>>,
}

impl PathSet {
    pub fn is_blind(&self) -> bool {
        self.per_element.iter().all(Vec::is_empty)
    }

    pub fn element(&self, n: usize) -> &[PathRecord] {
        &self.per_element[n]
    }
}

/// `M x N` complex channel, row `m` = subcarrier, column `n` = element.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    num_subcarriers: usize,
    num_elements: usize,
    values: Vec<Complex64>,
}

impl ChannelMatrix {
    pub fn zeros(num_subcarriers: usize, num_elements: usize) -> Self {
        ChannelMatrix { num_subcarriers, num_elements, values: vec![Complex64::new(0.0, 0.0); num_subcarriers * num_elements] }
    }

    pub fn from_values(num_subcarriers: usize, num_elements: usize, values: Vec<Complex64>) -> Self {
        assert_eq!(values.len(), num_subcarriers * num_elements, "channel shape mismatch");
        ChannelMatrix { num_subcarriers, num_elements, values }
    }

    pub fn num_subcarriers(&self) -> usize {
        self.num_subcarriers
    }

    pub fn num_elements(&self) -> usize {
        self.num_elements
    }

    pub fn get(&self, m: usize, n: usize) -> Complex64 {
        self.values[m * self.num_elements + n]
    }

    pub fn row(&self, m: usize) -> &[Complex64] {
        &self.values[m * self.num_elements..(m + 1) * self.num_elements]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn column_is_zero(&self, n: usize) -> bool {
        (0..self.num_subcarriers).all(|m| self.get(m, n) == Complex64::new(0.0, 0.0))
    }

    fn set_column(&mut self, n: usize, col: &[Complex64]) {
        for (m, &v) in col.iter().enumerate() {
            self.values[m * self.num_elements + n] = v;
        }
    }
}

/// Channel model used for prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChannelModel {
    /// Spherical wavefront, per-element path indicators.
    NearField,
    /// Planar wavefront, array-common path indicators.
    FarField,
}

impl ChannelModel {
    pub fn label(self) -> &'static str {
        match self {
            ChannelModel::NearField => "nf",
            ChannelModel::FarField => "ff",
        }
    }
}

/// True when `wall` touches the open leg `a -> b` anywhere farther than
/// `eps` from both leg endpoints.
fn leg_blocked(a: Point, b: Point, wall: &Segment, eps: f64) -> bool {
    leg_blocked_with(a, b, wall, wall.signed_distance(a), wall.signed_distance(b), eps)
}

/// [`leg_blocked`] with the signed distances of `a` and `b` from the wall
/// line supplied by the caller.
#[inline]
fn leg_blocked_with(a: Point, b: Point, wall: &Segment, l1: f64, l2: f64, eps: f64) -> bool {
    // Both endpoints strictly on one side: the whole leg stays farther than
    // eps from the wall line.
    if (l1 > eps && l2 > eps) || (l1 < -eps && l2 < -eps) {
        return false;
    }
    let (wa, wb) = (wall.a(), wall.b());
    if wa.x.max(wb.x) < a.x.min(b.x) - eps
        || wa.x.min(wb.x) > a.x.max(b.x) + eps
        || wa.y.max(wb.y) < a.y.min(b.y) - eps
        || wa.y.min(wb.y) > a.y.max(b.y) + eps
    {
        return false;
    }
    let d = b - a;
    let len = d.norm();
    if len <= 2.0 * eps {
        return false;
    }

    let w1 = d.cross(wa - a) / len;
    let w2 = d.cross(wb - a) / len;
    if (w1 > eps && w2 > eps) || (w1 < -eps && w2 < -eps) {
        return false;
    }
    let strict = |u: f64, v: f64| (u > eps && v < -eps) || (u < -eps && v > eps);

    if strict(w1, w2) && strict(l1, l2) {
        let x = a + d * (l1 / (l1 - l2));
        return x.distance(a) > eps && x.distance(b) > eps;
    }

    let leg = Segment::new(a, b).expect("leg longer than 2 eps");
    for q in [wa, wb] {
        if leg.distance_to_point(q) <= eps && q.distance(a) > eps && q.distance(b) > eps {
            return true;
        }
    }
    // Leg lying along the wall.
    wall.distance_to_point(a) <= eps && wall.distance_to_point(b) <= eps
}

/// Direct-path indicator for one antenna.
pub fn los_indicator(antenna: Point, p: Point, surfaces: &[Surface]) -> bool {
    !surfaces.iter().any(|s| leg_blocked(antenna, p, &s.geom, EPS_GEOM))
}

/// Single-bounce indicator via `surface` for one antenna.
pub fn nlos_indicator(antenna: Point, surface: &Surface, p: Point, surfaces: &[Surface]) -> bool {
    let mut tests = 0;
    bounce(antenna, surface, p, surfaces, &mut tests).is_some()
}

/// Valid reflection point of the bounce `origin -> surface -> p`, if any.
fn bounce(origin: Point, surface: &Surface, p: Point, surfaces: &[Surface], tests: &mut u64) -> Option<Point> {
    let g = &surface.geom;
    *tests += 1;
    let r = geometry::reflection_point(origin, p, g, EPS_GEOM)?;
    bounce_unblocked(origin, r, p, surface.id, surfaces, tests).then_some(r)
}

fn bounce_unblocked(origin: Point, r: Point, p: Point, via: usize, surfaces: &[Surface], tests: &mut u64) -> bool {
    let origin_dist: Vec<f64> = surfaces.iter().map(|s| s.geom.signed_distance(origin)).collect();
    let p_dist: Vec<f64> = surfaces.iter().map(|s| s.geom.signed_distance(p)).collect();
    let via = surfaces.iter().position(|s| s.id == via).unwrap_or(usize::MAX);
    bounce_unblocked_with(origin, r, p, via, surfaces, &origin_dist, &p_dist, tests)
}

/// Checks both bounce legs against every surface except index `via`.
#[allow(clippy::too_many_arguments)]
fn bounce_unblocked_with(
    origin: Point,
    r: Point,
    p: Point,
    via: usize,
    surfaces: &[Surface],
    origin_dist: &[f64],
    p_dist: &[f64],
    tests: &mut u64,
) -> bool {
    for (i, w) in surfaces.iter().enumerate() {
        if i == via {
            continue;
        }
        *tests += 1;
        let lr = w.geom.signed_distance(r);
        if leg_blocked_with(origin, r, &w.geom, origin_dist[i], lr, EPS_GEOM)
            || leg_blocked_with(r, p, &w.geom, lr, p_dist[i], EPS_GEOM)
        {
            return false;
        }
    }
    true
}

fn reflected_beta(model: &ReflectModel, origin: Point, r: Point, da: f64) -> f64 {
    match model {
        ReflectModel::ConstantBeta(beta) => *beta,
        ReflectModel::Fresnel { .. } => {
            let theta = (da.abs() / origin.distance(r)).clamp(0.0, 1.0).acos();
            reflection_coefficient(model, theta)
        }
    }
}

/// Per-candidate data shared by all antennas: the mirror image of the UE
/// position across each surface and its signed line distance.
struct CandidateImages {
    signed: Vec<f64>,
    mirrored: Vec<Point>,
}

/// Traces paths from fixed antenna origins against a fixed surface list.
#[derive(Debug, Clone)]
struct PathTracer {
    surfaces: Vec<Surface>,
}

impl PathTracer {
    fn images(&self, p: Point) -> CandidateImages {
        CandidateImages {
            signed: self.surfaces.iter().map(|s| s.geom.signed_distance(p)).collect(),
            mirrored: self.surfaces.iter().map(|s| geometry::mirror_point(p, &s.geom)).collect(),
        }
    }

    /// Calls `visit(kind, refl_pt, distance, beta)` for every valid path
    /// from `origin` to `p`. `origin_dist[s]` is the signed distance of the
    /// origin from surface `s`'s line.
    fn trace(
        &self,
        origin: Point,
        origin_dist: &[f64],
        p: Point,
        images: &CandidateImages,
        tests: &mut u64,
        mut visit: impl FnMut(PathKind, Option<Point>, f64, f64),
    ) {
        let surfaces = &self.surfaces;
        let mut los = true;
        for (i, s) in surfaces.iter().enumerate() {
            *tests += 1;
            if leg_blocked_with(origin, p, &s.geom, origin_dist[i], images.signed[i], EPS_GEOM) {
                los = false;
                break;
            }
        }
        if los {
            visit(PathKind::Los, None, origin.distance(p), 1.0);
        }
        for (i, s) in surfaces.iter().enumerate() {
            *tests += 1;
            let (da, du) = (origin_dist[i], images.signed[i]);
            let Some(r) = geometry::reflection_point_from_distances(origin, images.mirrored[i], &s.geom, da, du, EPS_GEOM)
            else {
                continue;
            };
            if bounce_unblocked_with(origin, r, p, i, surfaces, origin_dist, &images.signed, tests) {
                let distance = origin.distance(r) + r.distance(p);
                let beta = reflected_beta(&s.model, origin, r, origin_dist[i]);
                visit(PathKind::Nlos { surface_id: s.id }, Some(r), distance, beta);
            }
        }
    }
}

/// Builds the per-element path sets of UE position `p`.
pub fn build_path_set(p: Point, array: &ArrayGeometry, surfaces: &[Surface]) -> PathSet {
    build_path_set_counted(p, array, surfaces).0
}

/// [`build_path_set`] plus the number of surface-versus-path checks it
/// performed (reflection-point constructions included).
pub fn build_path_set_counted(p: Point, array: &ArrayGeometry, surfaces: &[Surface]) -> (PathSet, u64) {
    let tracer = PathTracer { surfaces: surfaces.to_vec() };
    let images = tracer.images(p);
    let mut tests = 0;
    let per_element = array
        .elements()
        .iter()
        .map(|&e| {
            let dist: Vec<f64> = surfaces.iter().map(|s| s.geom.signed_distance(e)).collect();
            let mut paths = Vec::new();
            tracer.trace(e, &dist, p, &images, &mut tests, |kind, refl_pt, distance, beta| {
                paths.push(PathRecord { kind, refl_pt, distance, beta });
            });
            paths
        })
        .collect();
    (PathSet { per_element }, tests)
}

/// Evaluates predicted channel columns for candidate positions.
///
/// Holds the array, a surface list and the subcarrier grid; the same
/// predictor serves both the true channel (full surface list) and the
/// tracker's prediction (known subset).
#[derive(Debug, Clone)]
pub struct ChannelPredictor {
    tracer: PathTracer,
    elements: Vec<Point>,
    /// Signed distance of element `n` from surface `s`: `[n * S + s]`.
    element_dist: Vec<f64>,
    centroid: Point,
    centroid_dist: Vec<f64>,
    wavenumbers: Vec<f64>,
    uniform_step: Option<f64>,
    /// `λ_m / 4π`
    gain_scale: Vec<f64>,
}

impl ChannelPredictor {
    pub fn new(array: &ArrayGeometry, surfaces: &[Surface], ofdm: &OfdmConfig) -> Self {
        let elements = array.elements().to_vec();
        let element_dist = elements
            .iter()
            .flat_map(|&e| surfaces.iter().map(move |s| s.geom.signed_distance(e)))
            .collect();
        let centroid = array.centroid();
        let centroid_dist = surfaces.iter().map(|s| s.geom.signed_distance(centroid)).collect();
        ChannelPredictor {
            tracer: PathTracer { surfaces: surfaces.to_vec() },
            elements,
            element_dist,
            centroid,
            centroid_dist,
            wavenumbers: ofdm.wavenumbers().to_vec(),
            uniform_step: ofdm.uniform_step(),
            gain_scale: ofdm.wavelengths().iter().map(|l| l / (4.0 * PI)).collect(),
        }
    }

    pub fn surfaces(&self) -> &[Surface] {
        &self.tracer.surfaces
    }

    pub fn num_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn num_subcarriers(&self) -> usize {
        self.wavenumbers.len()
    }

    /// Adds `amp * λ_m/(4π) * exp(-i k_m phase_dist)` to every subcarrier.
    #[inline]
    fn add_path(&self, col: &mut [Complex64], amp: f64, phase_dist: f64) {
        match self.uniform_step {
            Some(dk) => {
                let mut ph = Complex64::from_polar(1.0, -self.wavenumbers[0] * phase_dist);
                let step = Complex64::from_polar(1.0, -dk * phase_dist);
                for (c, &g) in col.iter_mut().zip(&self.gain_scale) {
                    *c += ph * (amp * g);
                    ph *= step;
                }
            }
            None => {
                for ((c, &g), &k) in col.iter_mut().zip(&self.gain_scale).zip(&self.wavenumbers) {
                    *c += Complex64::from_polar(amp * g, -k * phase_dist);
                }
            }
        }
    }

    /// Calls `f(n, column)` for every element with the `M` channel values
    /// at candidate `p`. Returns the number of surface-versus-path checks.
    pub fn for_each_column(&self, p: Point, model: ChannelModel, mut f: impl FnMut(usize, &[Complex64])) -> u64 {
        let m = self.num_subcarriers();
        let s = self.tracer.surfaces.len();
        let images = self.tracer.images(p);
        let mut col = vec![Complex64::new(0.0, 0.0); m];
        let mut tests = 0;
        match model {
            ChannelModel::NearField => {
                for (n, &e) in self.elements.iter().enumerate() {
                    col.fill(Complex64::new(0.0, 0.0));
                    let dist = &self.element_dist[n * s..(n + 1) * s];
                    self.tracer.trace(e, dist, p, &images, &mut tests, |_, _, d, beta| {
                        if d > EPS_GEOM {
                            self.add_path(&mut col, beta / d, d);
                        }
                    });
                    f(n, &col);
                }
            }
            ChannelModel::FarField => {
                let mut paths: Vec<(f64, f64, Point)> = Vec::new();
                let c = self.centroid;
                self.tracer.trace(c, &self.centroid_dist, p, &images, &mut tests, |_, r, d, beta| {
                    let source = r.unwrap_or(p);
                    let span = source.distance(c);
                    if d > EPS_GEOM && span > EPS_GEOM {
                        paths.push((d, beta, (source - c) * (1.0 / span)));
                    }
                });
                for (n, &e) in self.elements.iter().enumerate() {
                    col.fill(Complex64::new(0.0, 0.0));
                    let offset = e - c;
                    for &(d, beta, dir) in &paths {
                        self.add_path(&mut col, beta / d, d - offset.dot(dir));
                    }
                    f(n, &col);
                }
            }
        }
        tests
    }

    pub fn channel(&self, p: Point, model: ChannelModel) -> ChannelMatrix {
        let mut h = ChannelMatrix::zeros(self.num_subcarriers(), self.num_elements());
        self.for_each_column(p, model, |n, col| h.set_column(n, col));
        h
    }
}

/// Near-field channel at `p` over the given surfaces.
pub fn channel_matrix(p: Point, array: &ArrayGeometry, surfaces: &[Surface], ofdm: &OfdmConfig) -> ChannelMatrix {
    ChannelPredictor::new(array, surfaces, ofdm).channel(p, ChannelModel::NearField)
}

/// Far-field baseline channel: paths evaluated once at the array centroid,
/// planar phase progression across elements.
pub fn ff_channel_matrix(p: Point, array: &ArrayGeometry, surfaces: &[Surface], ofdm: &OfdmConfig) -> ChannelMatrix {
    ChannelPredictor::new(array, surfaces, ofdm).channel(p, ChannelModel::FarField)
}
