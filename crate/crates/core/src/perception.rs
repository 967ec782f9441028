//! Synthetic sensing pipeline standing in for the depth camera.
//!
//! The renderer produces a top-down orthographic depth grid of the scene:
//! slots are raised prisms, the cable is a tube resting on the table, and
//! the cable mask is ground truth (the stand-in for learned segmentation).
//! Slot poses are recovered by depth filtering plus PCA; the cable cloud is
//! denoised by Euclidean clustering and abstracted into an ordered node
//! chain by a moving-window walk from the fixed end.

use crate::scene::{resample_polyline, CableState, Scene, SceneError, SlotPose};
use crate::{Point, Vec3};
use nalgebra::Matrix3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::io::{self, BufRead, Write};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PerceptionError {
    #[error("no region found below the depth threshold")]
    NoRegionFound,
    #[error("degenerate covariance: point cloud is (near) coincident")]
    DegenerateCovariance,
    #[error("all points discarded by clustering (min cluster size {0})")]
    AllPointsDiscarded(usize),
    #[error("ambiguous topology: {0} cloud points farther than the coverage radius from the extracted chain")]
    AmbiguousTopology(usize),
    #[error("cable cloud too small or degenerate: {0}")]
    DegenerateCloud(String),
    #[error("fixed end is {0} m from the nearest cloud extremity (limit {1} m)")]
    FixedEndTooFar(f64, f64),
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Label attached to a point cloud.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CloudLabel {
    Slot(usize),
    Cable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    pub points: Vec<Point>,
    pub label: CloudLabel,
}

/// Top-down orthographic depth image with a ground-truth cable mask.
///
/// Pixel `(row, col)` is centered at world
/// `(origin.0 + col * pitch, origin.1 + row * pitch)`; `depth` is the
/// distance from the camera plane at `camera_height` down to the surface.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthGrid {
    pub width: usize,
    pub height: usize,
    /// Meters per pixel.
    pub pitch: f64,
    /// World coordinates of pixel (0, 0)'s center.
    pub origin: (f64, f64),
    /// Camera plane height, m.
    pub camera_height: f64,
    /// Row-major depths, m.
    pub depth: Vec<f64>,
    /// Row-major cable mask.
    pub cable_mask: Vec<bool>,
}

impl DepthGrid {
    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.depth[row * self.width + col]
    }

    pub fn pixel_center(&self, row: usize, col: usize) -> (f64, f64) {
        (
            self.origin.0 + col as f64 * self.pitch,
            self.origin.1 + row as f64 * self.pitch,
        )
    }

    /// World point for a pixel given its depth value.
    pub fn back_project(&self, row: usize, col: usize, depth: f64) -> Point {
        let (x, y) = self.pixel_center(row, col);
        Point::new(x, y, self.camera_height - depth)
    }
}

/// Camera/render configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RenderParams {
    pub width: usize,
    pub height: usize,
    /// Meters per pixel.
    pub pitch: f64,
    /// World coordinates of pixel (0, 0)'s center.
    pub origin: (f64, f64),
    /// Camera plane height, m.
    pub camera_height: f64,
    /// Additive Gaussian depth noise sigma, m.
    pub noise_sigma: f64,
}

impl Default for RenderParams {
    fn default() -> Self {
        Self {
            width: 420,
            height: 420,
            pitch: 2.5e-3,
            origin: (0.0, 0.0),
            camera_height: 1.0,
            noise_sigma: 0.0,
        }
    }
}

/// Slot footprints are rectangles inscribed in the max-radius circle with a
/// 3:1 aspect ratio, long side along the slot axis.
pub const FOOTPRINT_ASPECT: f64 = 3.0;

/// Half extents (along axis, across axis) of a slot footprint with
/// circumscribed radius `max_radius`.
pub fn slot_footprint_half_extents(max_radius: f64) -> (f64, f64) {
    let diag = (1.0 + FOOTPRINT_ASPECT * FOOTPRINT_ASPECT).sqrt();
    (
        FOOTPRINT_ASPECT * max_radius / diag,
        max_radius / diag,
    )
}

/// Render the scene to a depth grid. Deterministic for a fixed seed.
///
/// Painted per primitive: each slot prism and each cable tube segment only
/// touches the pixels inside its bounding box, so render cost scales with
/// drawn area rather than grid size times segment count.
pub fn render_depth(scene: &Scene, params: &RenderParams, seed: u64) -> DepthGrid {
    let z0 = scene.table_height;
    let r_cab = scene.cable.radius();
    let n_px = params.width * params.height;
    let mut height_map = vec![z0; n_px];
    let mut mask = vec![false; n_px];

    let col_range = |x_lo: f64, x_hi: f64| {
        let lo = ((x_lo - params.origin.0) / params.pitch).floor().max(0.0) as usize;
        let hi = ((x_hi - params.origin.0) / params.pitch).ceil() as isize;
        (lo, hi.clamp(0, params.width as isize - 1) as usize)
    };
    let row_range = |y_lo: f64, y_hi: f64| {
        let lo = ((y_lo - params.origin.1) / params.pitch).floor().max(0.0) as usize;
        let hi = ((y_hi - params.origin.1) / params.pitch).ceil() as isize;
        (lo, hi.clamp(0, params.height as isize - 1) as usize)
    };

    for (spec, pose) in &scene.slots {
        let top = z0 + spec.height;
        let (ha, hb) = slot_footprint_half_extents(spec.max_radius);
        let ax = pose.axis;
        let n = ax.x.hypot(ax.y);
        let (ux, uy) = (ax.x / n, ax.y / n);
        let (cx, cy) = (pose.center.x, pose.center.y);
        let reach = spec.max_radius;
        let (c_lo, c_hi) = col_range(cx - reach, cx + reach);
        let (r_lo, r_hi) = row_range(cy - reach, cy + reach);
        for row in r_lo..=r_hi {
            let y = params.origin.1 + row as f64 * params.pitch;
            for col in c_lo..=c_hi {
                let x = params.origin.0 + col as f64 * params.pitch;
                let dx = x - cx;
                let dy = y - cy;
                let u = dx * ux + dy * uy;
                let v = -dx * uy + dy * ux;
                let idx = row * params.width + col;
                if u.abs() <= ha && v.abs() <= hb && top > height_map[idx] {
                    height_map[idx] = top;
                    mask[idx] = false;
                }
            }
        }
    }

    for w in scene.cable_state.nodes.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (c_lo, c_hi) = col_range(a.x.min(b.x) - r_cab, a.x.max(b.x) + r_cab);
        let (r_lo, r_hi) = row_range(a.y.min(b.y) - r_cab, a.y.max(b.y) + r_cab);
        let sx = b.x - a.x;
        let sy = b.y - a.y;
        let len2 = sx * sx + sy * sy;
        for row in r_lo..=r_hi {
            let y = params.origin.1 + row as f64 * params.pitch;
            for col in c_lo..=c_hi {
                let x = params.origin.0 + col as f64 * params.pitch;
                let t = if len2 > 0.0 {
                    (((x - a.x) * sx + (y - a.y) * sy) / len2).clamp(0.0, 1.0)
                } else {
                    0.0
                };
                let px = a.x + t * sx;
                let py = a.y + t * sy;
                let d = (x - px).hypot(y - py);
                if d <= r_cab {
                    let zc = a.z + t * (b.z - a.z);
                    let top = zc + (r_cab * r_cab - d * d).sqrt();
                    let idx = row * params.width + col;
                    if top > height_map[idx] {
                        height_map[idx] = top;
                        mask[idx] = true;
                    }
                }
            }
        }
    }

    let mut depth: Vec<f64> = height_map
        .into_iter()
        .map(|h| params.camera_height - h)
        .collect();

    if params.noise_sigma > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, params.noise_sigma).expect("valid sigma");
        for d in depth.iter_mut() {
            *d += normal.sample(&mut rng);
        }
    }

    DepthGrid {
        width: params.width,
        height: params.height,
        pitch: params.pitch,
        origin: params.origin,
        camera_height: params.camera_height,
        depth,
        cable_mask: mask,
    }
}

/// Separable Gaussian smoothing with sigma in pixels; `sigma == 0` is
/// identity. Borders are clamped, so constant grids stay constant.
pub fn smooth_depth(grid: &DepthGrid, kernel_sigma: f64) -> DepthGrid {
    assert!(kernel_sigma >= 0.0, "kernel sigma must be nonnegative");
    if kernel_sigma == 0.0 {
        return grid.clone();
    }
    let radius = (3.0 * kernel_sigma).ceil() as i64;
    let mut kernel = Vec::with_capacity(2 * radius as usize + 1);
    for i in -radius..=radius {
        kernel.push((-(i as f64 * i as f64) / (2.0 * kernel_sigma * kernel_sigma)).exp());
    }
    let sum: f64 = kernel.iter().sum();
    for k in kernel.iter_mut() {
        *k /= sum;
    }

    let (w, h) = (grid.width as i64, grid.height as i64);
    let mut tmp = vec![0.0; grid.depth.len()];
    for row in 0..h {
        for col in 0..w {
            let mut acc = 0.0;
            for (j, k) in kernel.iter().enumerate() {
                let c = (col + j as i64 - radius).clamp(0, w - 1);
                acc += k * grid.depth[(row * w + c) as usize];
            }
            tmp[(row * w + col) as usize] = acc;
        }
    }
    let mut out = vec![0.0; grid.depth.len()];
    for row in 0..h {
        for col in 0..w {
            let mut acc = 0.0;
            for (j, k) in kernel.iter().enumerate() {
                let r = (row + j as i64 - radius).clamp(0, h - 1);
                acc += k * tmp[(r * w + col) as usize];
            }
            out[(row * w + col) as usize] = acc;
        }
    }

    DepthGrid {
        depth: out,
        ..grid.clone()
    }
}

const MIN_REGION_PIXELS: usize = 4;

/// Connected pixel regions shallower than `depth_threshold`, back-projected
/// to 3D; one cloud per slot, ordered by centroid (y, then x).
pub fn slot_regions(grid: &DepthGrid, depth_threshold: f64) -> Result<Vec<PointCloud>, PerceptionError> {
    let w = grid.width;
    let h = grid.height;
    let mut visited = vec![false; w * h];
    let mut regions: Vec<Vec<usize>> = Vec::new();

    for start in 0..w * h {
        if visited[start] || grid.depth[start] >= depth_threshold {
            continue;
        }
        let mut region = Vec::new();
        let mut stack = vec![start];
        visited[start] = true;
        while let Some(idx) = stack.pop() {
            region.push(idx);
            let (r, c) = (idx / w, idx % w);
            for dr in -1i64..=1 {
                for dc in -1i64..=1 {
                    let nr = r as i64 + dr;
                    let nc = c as i64 + dc;
                    if nr < 0 || nc < 0 || nr >= h as i64 || nc >= w as i64 {
                        continue;
                    }
                    let nidx = (nr as usize) * w + nc as usize;
                    if !visited[nidx] && grid.depth[nidx] < depth_threshold {
                        visited[nidx] = true;
                        stack.push(nidx);
                    }
                }
            }
        }
        if region.len() >= MIN_REGION_PIXELS {
            regions.push(region);
        }
    }

    if regions.is_empty() {
        return Err(PerceptionError::NoRegionFound);
    }

    let mut clouds: Vec<(Point, Vec<Point>)> = regions
        .into_iter()
        .map(|region| {
            let pts: Vec<Point> = region
                .iter()
                .map(|&idx| grid.back_project(idx / w, idx % w, grid.depth[idx]))
                .collect();
            let centroid = centroid_of(&pts);
            (centroid, pts)
        })
        .collect();
    clouds.sort_by(|a, b| (a.0.y, a.0.x).partial_cmp(&(b.0.y, b.0.x)).unwrap());

    Ok(clouds
        .into_iter()
        .enumerate()
        .map(|(k, (_, points))| PointCloud {
            points,
            label: CloudLabel::Slot(k),
        })
        .collect())
}

fn centroid_of(points: &[Point]) -> Point {
    let mut acc = Vec3::zeros();
    for p in points {
        acc += p.coords;
    }
    Point::from(acc / points.len() as f64)
}

/// Axis sign canonicalization: nonnegative x, tie-break toward nonnegative
/// y, then z, with a small tolerance so near-zero components do not flip.
fn canonical_sign(axis: Vec3) -> Vec3 {
    const TOL: f64 = 1e-9;
    let flip = if axis.x > TOL {
        false
    } else if axis.x < -TOL {
        true
    } else if axis.y > TOL {
        false
    } else if axis.y < -TOL {
        true
    } else {
        axis.z < 0.0
    };
    if flip {
        -axis
    } else {
        axis
    }
}

/// PCA pose of a slot cloud: centroid plus the principal eigenvector of the
/// covariance matrix, sign-normalized.
pub fn estimate_slot_pose(cloud: &PointCloud) -> Result<SlotPose, PerceptionError> {
    if cloud.points.len() < 3 {
        return Err(PerceptionError::DegenerateCovariance);
    }
    let centroid = centroid_of(&cloud.points);
    let mut cov = Matrix3::zeros();
    for p in &cloud.points {
        let d = p - centroid;
        cov += d * d.transpose();
    }
    cov /= cloud.points.len() as f64;

    let eig = cov.symmetric_eigen();
    let (mut max_i, mut max_l) = (0, eig.eigenvalues[0]);
    for i in 1..3 {
        if eig.eigenvalues[i] > max_l {
            max_l = eig.eigenvalues[i];
            max_i = i;
        }
    }
    if max_l <= 1e-18 {
        return Err(PerceptionError::DegenerateCovariance);
    }
    let axis = canonical_sign(eig.eigenvectors.column(max_i).into_owned().normalize());
    Ok(SlotPose { center: centroid, axis })
}

/// Single-linkage Euclidean clustering: connected components of the graph
/// linking points closer than `link_radius`; components smaller than
/// `min_cluster` are discarded.
pub fn cluster_points(
    cloud: &PointCloud,
    link_radius: f64,
    min_cluster: usize,
) -> Result<Vec<PointCloud>, PerceptionError> {
    assert!(link_radius > 0.0, "link radius must be positive");
    let pts = &cloud.points;
    if pts.is_empty() {
        return Err(PerceptionError::AllPointsDiscarded(min_cluster));
    }

    // Uniform grid hash with cell size = link radius.
    let cell = |p: &Point| {
        (
            (p.x / link_radius).floor() as i64,
            (p.y / link_radius).floor() as i64,
            (p.z / link_radius).floor() as i64,
        )
    };
    let mut grid: std::collections::HashMap<(i64, i64, i64), Vec<usize>> =
        std::collections::HashMap::new();
    for (i, p) in pts.iter().enumerate() {
        grid.entry(cell(p)).or_default().push(i);
    }

    let r2 = link_radius * link_radius;
    let mut visited = vec![false; pts.len()];
    let mut clusters = Vec::new();
    for start in 0..pts.len() {
        if visited[start] {
            continue;
        }
        visited[start] = true;
        let mut members = vec![start];
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            let (cx, cy, cz) = cell(&pts[i]);
            for dx in -1..=1 {
                for dy in -1..=1 {
                    for dz in -1..=1 {
                        if let Some(bucket) = grid.get(&(cx + dx, cy + dy, cz + dz)) {
                            for &j in bucket {
                                if !visited[j] && (pts[j] - pts[i]).norm_squared() <= r2 {
                                    visited[j] = true;
                                    members.push(j);
                                    stack.push(j);
                                }
                            }
                        }
                    }
                }
            }
        }
        if members.len() >= min_cluster {
            members.sort_unstable();
            clusters.push(PointCloud {
                points: members.iter().map(|&i| pts[i]).collect(),
                label: cloud.label,
            });
        }
    }

    if clusters.is_empty() {
        return Err(PerceptionError::AllPointsDiscarded(min_cluster));
    }
    Ok(clusters)
}

/// Parameters of the moving-window chain extraction.
#[derive(Debug, Clone, Copy)]
pub struct ChainParams {
    /// Greedy-walk window radius; default 1.5 * cable diameter.
    pub window_radius: f64,
    /// Every cloud point must lie within this distance of the chain;
    /// default 2 * cable diameter.
    pub coverage_radius: f64,
    /// Maximum allowed gap between the fixed end and the starting cloud
    /// extremity.
    pub max_start_gap: f64,
}

impl ChainParams {
    pub fn for_diameter(diameter: f64) -> Self {
        Self {
            window_radius: 1.5 * diameter,
            coverage_radius: 2.0 * diameter,
            max_start_gap: 4.0 * diameter,
        }
    }
}

/// Abstract an unbranched cable cloud into a `q`-node uniform-arclength
/// chain ordered from the extremity nearest `fixed_end`.
///
/// The walk starts at that extremity and repeatedly steps to the centroid of
/// the unvisited points inside the window, which realizes an ordered
/// backbone for unbranched, unoccluded cables. Branched clouds leave an arm
/// uncovered and are rejected.
pub fn extract_node_chain(
    cloud: &PointCloud,
    q: usize,
    fixed_end: Point,
    params: &ChainParams,
) -> Result<CableState, PerceptionError> {
    let pts = &cloud.points;
    if pts.len() < 2 {
        return Err(PerceptionError::DegenerateCloud(format!(
            "{} points",
            pts.len()
        )));
    }

    // Diameter double-sweep for the two extremities.
    let c = centroid_of(pts);
    let far_from = |anchor: Point| -> usize {
        let mut best = (0, -1.0);
        for (i, p) in pts.iter().enumerate() {
            let d = (p - anchor).norm_squared();
            if d > best.1 {
                best = (i, d);
            }
        }
        best.0
    };
    let end_a = far_from(c);
    let end_b = far_from(pts[end_a]);
    let (start, gap) = {
        let da = (pts[end_a] - fixed_end).norm();
        let db = (pts[end_b] - fixed_end).norm();
        if da <= db {
            (end_a, da)
        } else {
            (end_b, db)
        }
    };
    if gap > params.max_start_gap {
        return Err(PerceptionError::FixedEndTooFar(gap, params.max_start_gap));
    }

    // Moving-window walk.
    let w2 = params.window_radius * params.window_radius;
    let mut visited = vec![false; pts.len()];
    let mut raw: Vec<Point> = vec![pts[start]];
    visited[start] = true;
    let mut cursor = pts[start];
    loop {
        let mut acc = Vec3::zeros();
        let mut count = 0usize;
        for (i, p) in pts.iter().enumerate() {
            if !visited[i] && (p - cursor).norm_squared() <= w2 {
                acc += p.coords;
                count += 1;
                visited[i] = true;
            }
        }
        if count == 0 {
            break;
        }
        cursor = Point::from(acc / count as f64);
        raw.push(cursor);
    }

    // Coverage check: leftover far points mean branching or gaps.
    let stray = pts
        .iter()
        .filter(|p| distance_to_polyline(&raw, p) > params.coverage_radius)
        .count();
    if stray > 0 {
        return Err(PerceptionError::AmbiguousTopology(stray));
    }
    if raw.len() < 2 {
        return Err(PerceptionError::DegenerateCloud(
            "walk produced a single node".into(),
        ));
    }

    let mut state = resample_polyline(&raw, q)?;
    state.fixed_end = fixed_end;
    Ok(state)
}

/// Minimum distance from `p` to the polyline.
pub fn distance_to_polyline(polyline: &[Point], p: &Point) -> f64 {
    let mut best = f64::INFINITY;
    if polyline.len() == 1 {
        return (p - polyline[0]).norm();
    }
    for w in polyline.windows(2) {
        let seg = w[1] - w[0];
        let len2 = seg.norm_squared();
        let t = if len2 > 0.0 {
            ((p - w[0]).dot(&seg) / len2).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let closest = w[0] + seg * t;
        best = best.min((p - closest).norm());
    }
    best
}

/// Depth quantization step for the 16-bit PGM export, m.
pub const PGM_DEPTH_SCALE: f64 = 1e-4;

/// Write the grid as a binary 16-bit PGM with metadata in header comments.
pub fn write_pgm<W: Write>(grid: &DepthGrid, out: &mut W) -> io::Result<()> {
    writeln!(out, "P5")?;
    writeln!(out, "# carobio depth grid v1")?;
    writeln!(out, "# pitch_m {}", grid.pitch)?;
    writeln!(out, "# origin_m {} {}", grid.origin.0, grid.origin.1)?;
    writeln!(out, "# camera_height_m {}", grid.camera_height)?;
    writeln!(out, "# depth_scale_m_per_unit {PGM_DEPTH_SCALE}")?;
    writeln!(out, "{} {}", grid.width, grid.height)?;
    writeln!(out, "65535")?;
    let mut buf = Vec::with_capacity(grid.depth.len() * 2);
    for &d in &grid.depth {
        let v = (d / PGM_DEPTH_SCALE).round().clamp(0.0, 65535.0) as u16;
        buf.extend_from_slice(&v.to_be_bytes());
    }
    out.write_all(&buf)
}

/// Read back a grid written by [`write_pgm`]. Depths are quantized to the
/// export scale; the cable mask is not stored in the image.
pub fn read_pgm<R: BufRead>(input: &mut R) -> io::Result<DepthGrid> {
    let mut line = String::new();
    input.read_line(&mut line)?;
    if line.trim() != "P5" {
        return Err(io::Error::new(io::ErrorKind::InvalidData, "not a P5 PGM"));
    }
    let mut pitch = 0.0;
    let mut origin = (0.0, 0.0);
    let mut camera_height = 0.0;
    let mut scale = PGM_DEPTH_SCALE;
    let mut dims: Option<(usize, usize)> = None;
    loop {
        line.clear();
        input.read_line(&mut line)?;
        let t = line.trim();
        if let Some(rest) = t.strip_prefix('#') {
            let parts: Vec<&str> = rest.split_whitespace().collect();
            match parts.first() {
                Some(&"pitch_m") => pitch = parts[1].parse().unwrap_or(0.0),
                Some(&"origin_m") => {
                    origin = (
                        parts[1].parse().unwrap_or(0.0),
                        parts[2].parse().unwrap_or(0.0),
                    )
                }
                Some(&"camera_height_m") => camera_height = parts[1].parse().unwrap_or(0.0),
                Some(&"depth_scale_m_per_unit") => scale = parts[1].parse().unwrap_or(scale),
                _ => {}
            }
            continue;
        }
        if dims.is_none() {
            let mut it = t.split_whitespace();
            let w: usize = it
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidData, "bad dims"))?;
            let h: usize = it
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidData, "bad dims"))?;
            dims = Some((w, h));
        } else {
            break; // maxval line consumed
        }
    }
    let (w, h) = dims.unwrap();
    let mut buf = vec![0u8; w * h * 2];
    input.read_exact(&mut buf)?;
    let depth: Vec<f64> = buf
        .chunks_exact(2)
        .map(|b| u16::from_be_bytes([b[0], b[1]]) as f64 * scale)
        .collect();
    Ok(DepthGrid {
        width: w,
        height: h,
        pitch,
        origin,
        camera_height,
        depth,
        cable_mask: vec![false; w * h],
    })
}

/// Write a point cloud as `x,y,z,label` CSV rows.
pub fn write_cloud_csv<W: Write>(cloud: &PointCloud, out: &mut W) -> io::Result<()> {
    writeln!(out, "x,y,z,label")?;
    let label = match cloud.label {
        CloudLabel::Slot(k) => format!("slot_{k}"),
        CloudLabel::Cable => "cable".to_string(),
    };
    for p in &cloud.points {
        writeln!(out, "{},{},{},{label}", p.x, p.y, p.z)?;
    }
    Ok(())
}

/// Extract the cable point cloud from a grid: masked pixels back-projected
/// through the (possibly smoothed) depth values.
pub fn cable_cloud(grid: &DepthGrid) -> PointCloud {
    let mut points = Vec::new();
    for row in 0..grid.height {
        for col in 0..grid.width {
            let idx = row * grid.width + col;
            if grid.cable_mask[idx] {
                points.push(grid.back_project(row, col, grid.depth[idx]));
            }
        }
    }
    PointCloud {
        points,
        label: CloudLabel::Cable,
    }
}
