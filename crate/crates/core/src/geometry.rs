//! Hexagonal multi-cluster layout with wraparound, user drops, and
//! user-to-sector geometry.
//!
//! The preset layout is a 7-BS center cluster surrounded by six copies of
//! itself (49 BSs). BS 4 sits at the origin and BS 1..7 form the center
//! rosette. Each BS carries three sectors with boresights 0°, 120° and 240°
//! measured counter-clockwise from east; BS `b` (1-based) owns sectors
//! `3b-2`, `3b-1` and `3b`.
//!
//! Wraparound is modelled by translating the whole 49-BS field by six
//! shift vectors. Every link uses the image of the BS nearest to the user.

use std::fmt;
use std::io::Write;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

pub const SECTORS_PER_BS: usize = 3;

/// Links shorter than this are clamped before path loss is evaluated.
pub const MIN_LINK_DISTANCE_M: f64 = 1.0;

/// Zero-based BS index. Displays as the 1-based label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BsId(pub usize);

/// Zero-based sector index. Displays as the 1-based label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SectorId(pub usize);

impl BsId {
    pub fn from_label(label: usize) -> Option<Self> {
        label.checked_sub(1).map(BsId)
    }

    pub fn label(self) -> usize {
        self.0 + 1
    }

    pub fn sectors(self) -> [SectorId; SECTORS_PER_BS] {
        let first = self.0 * SECTORS_PER_BS;
        [SectorId(first), SectorId(first + 1), SectorId(first + 2)]
    }
}

impl SectorId {
    pub fn from_label(label: usize) -> Option<Self> {
        label.checked_sub(1).map(SectorId)
    }

    pub fn label(self) -> usize {
        self.0 + 1
    }

    /// The BS owning this sector, `⌈s/3⌉` in 1-based labels.
    pub fn bs(self) -> BsId {
        BsId(self.0 / SECTORS_PER_BS)
    }

    /// Position of the sector within its BS (0, 1 or 2).
    pub fn local_index(self) -> usize {
        self.0 % SECTORS_PER_BS
    }
}

impl fmt::Display for BsId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

impl fmt::Display for SectorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// Bearing of `other` seen from `self`, degrees counter-clockwise from east.
    pub fn bearing_to(self, other: Point) -> f64 {
        (other.y - self.y).atan2(other.x - self.x).to_degrees()
    }
}

impl std::ops::Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl std::ops::Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl From<[f64; 2]> for Point {
    fn from(p: [f64; 2]) -> Self {
        Point::new(p[0], p[1])
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

/// Wraps an angle in degrees into `[-180, 180)`.
pub fn wrap_degrees(angle: f64) -> f64 {
    (angle + 180.0).rem_euclid(360.0) - 180.0
}

/// Explicit BS positions replacing the hexagonal preset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomPositions {
    pub positions: Vec<Point>,
    /// Cluster id per BS; cluster 0 is the center cluster.
    pub cluster_of: Vec<usize>,
    #[serde(default)]
    pub wrap_shifts: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LayoutConfig {
    pub inter_site_distance: f64,
    pub cluster_size: usize,
    pub num_clusters: usize,
    pub sector_boresights_deg: [f64; SECTORS_PER_BS],
    pub custom: Option<CustomPositions>,
}

impl Default for LayoutConfig {
    fn default() -> Self {
        LayoutConfig {
            inter_site_distance: 500.0,
            cluster_size: 7,
            num_clusters: 7,
            sector_boresights_deg: [0.0, 120.0, 240.0],
            custom: None,
        }
    }
}

impl LayoutConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.inter_site_distance.is_finite() && self.inter_site_distance > 0.0) {
            return Err(Error::Layout(format!(
                "inter_site_distance must be positive, got {}",
                self.inter_site_distance
            )));
        }
        let b = self.sector_boresights_deg;
        for i in 0..SECTORS_PER_BS {
            let next = b[(i + 1) % SECTORS_PER_BS];
            let gap = (next - b[i]).rem_euclid(360.0);
            if (gap - 120.0).abs() > 1e-9 {
                return Err(Error::Layout(format!(
                    "sector boresights must be 120 degrees apart in order, got {b:?}"
                )));
            }
        }
        match &self.custom {
            None => {
                if self.cluster_size != 7 || self.num_clusters != 7 {
                    return Err(Error::Layout(format!(
                        "only the 7x7 hexagonal preset is built in (got cluster_size={}, num_clusters={}); supply custom positions",
                        self.cluster_size, self.num_clusters
                    )));
                }
            }
            Some(c) => {
                let total = self.cluster_size * self.num_clusters;
                if c.positions.len() != total || c.cluster_of.len() != total {
                    return Err(Error::Layout(format!(
                        "custom layout needs {total} positions and cluster ids, got {} and {}",
                        c.positions.len(),
                        c.cluster_of.len()
                    )));
                }
                if let Some(&bad) = c.cluster_of.iter().find(|&&q| q >= self.num_clusters) {
                    return Err(Error::Layout(format!("cluster id {bad} out of range")));
                }
                let center = c.cluster_of.iter().filter(|&&q| q == 0).count();
                if center != self.cluster_size {
                    return Err(Error::Layout(format!(
                        "center cluster has {center} BSs, expected {}",
                        self.cluster_size
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Axial lattice coordinates of BS 1..7 in the center rosette.
const ROSETTE: [(i64, i64); 7] = [(1, 0), (1, -1), (0, 1), (0, 0), (0, -1), (-1, 1), (-1, 0)];

/// Rotates axial coordinates by 60 degrees counter-clockwise.
fn rotate60((i, j): (i64, i64)) -> (i64, i64) {
    (-j, i + j)
}

/// Six rotations of `base` by multiples of 60 degrees.
fn hex_orbit(base: (i64, i64)) -> Vec<(i64, i64)> {
    std::iter::successors(Some(base), |&v| Some(rotate60(v)))
        .take(6)
        .collect()
}

fn axial_to_point((i, j): (i64, i64), isd: f64) -> Point {
    Point::new(
        isd * (i as f64 + 0.5 * j as f64),
        isd * (j as f64) * 3f64.sqrt() / 2.0,
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkLayout {
    isd: f64,
    bs_positions: Vec<Point>,
    cluster_of: Vec<usize>,
    cluster_size: usize,
    boresights_deg: [f64; SECTORS_PER_BS],
    wrap_shifts: Vec<Point>,
}

/// Distance and antenna offset angle of one user-sector link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    pub distance_m: f64,
    pub offset_deg: f64,
}

pub fn build_layout(config: &LayoutConfig) -> Result<NetworkLayout> {
    config.validate()?;
    let isd = config.inter_site_distance;
    let (bs_positions, cluster_of, wrap_shifts) = match &config.custom {
        Some(c) => (c.positions.clone(), c.cluster_of.clone(), c.wrap_shifts.clone()),
        None => {
            // 7-cell clusters tile the lattice with shifts (2 + w) * w^k and
            // the 49-cell field with (2 + w)^2 * w^k, w = exp(i*pi/3).
            let mut cluster_shifts = vec![(0, 0)];
            cluster_shifts.extend(hex_orbit((2, 1)));
            let mut positions = Vec::with_capacity(49);
            let mut clusters = Vec::with_capacity(49);
            for (q, &(si, sj)) in cluster_shifts.iter().enumerate() {
                for &(i, j) in &ROSETTE {
                    positions.push(axial_to_point((i + si, j + sj), isd));
                    clusters.push(q);
                }
            }
            let wraps = hex_orbit((3, 5))
                .into_iter()
                .map(|v| axial_to_point(v, isd))
                .collect();
            (positions, clusters, wraps)
        }
    };
    Ok(NetworkLayout {
        isd,
        bs_positions,
        cluster_of,
        cluster_size: config.cluster_size,
        boresights_deg: config.sector_boresights_deg,
        wrap_shifts,
    })
}

impl NetworkLayout {
    pub fn inter_site_distance(&self) -> f64 {
        self.isd
    }

    pub fn num_bs(&self) -> usize {
        self.bs_positions.len()
    }

    pub fn num_sectors(&self) -> usize {
        self.num_bs() * SECTORS_PER_BS
    }

    pub fn bs_position(&self, bs: BsId) -> Point {
        self.bs_positions[bs.0]
    }

    pub fn bs_positions(&self) -> &[Point] {
        &self.bs_positions
    }

    pub fn cluster_of(&self, bs: BsId) -> usize {
        self.cluster_of[bs.0]
    }

    pub fn wrap_shifts(&self) -> &[Point] {
        &self.wrap_shifts
    }

    pub fn sector_boresight(&self, sector: SectorId) -> f64 {
        self.boresights_deg[sector.local_index()]
    }

    /// BSs of the center cluster in ascending id order.
    pub fn center_bss(&self) -> Vec<BsId> {
        (0..self.num_bs())
            .filter(|&b| self.cluster_of[b] == 0)
            .map(BsId)
            .collect()
    }

    pub fn center_sectors(&self) -> Vec<SectorId> {
        self.center_bss().into_iter().flat_map(BsId::sectors).collect()
    }

    /// The wraparound image of `bs` nearest to `p`, with its distance.
    pub fn nearest_image(&self, bs: BsId, p: Point) -> (Point, f64) {
        let base = self.bs_positions[bs.0];
        let mut best = (base, base.distance(p));
        for &shift in &self.wrap_shifts {
            let image = base + shift;
            let d = image.distance(p);
            if d < best.1 {
                best = (image, d);
            }
        }
        best
    }

    /// Minimum distance between two BSs over all wraparound images.
    pub fn wrap_distance(&self, a: BsId, b: BsId) -> f64 {
        self.nearest_image(b, self.bs_positions[a.0]).1
    }

    /// Distance (clamped to 1 m) and boresight offset of a user-sector link,
    /// both taken from the nearest image of the sector's BS.
    pub fn user_sector_geometry(&self, user: Point, sector: SectorId) -> Result<LinkGeometry> {
        if sector.0 >= self.num_sectors() {
            return Err(Error::Layout(format!("sector {sector} does not exist")));
        }
        let (image, d) = self.nearest_image(sector.bs(), user);
        Ok(LinkGeometry {
            distance_m: d.max(MIN_LINK_DISTANCE_M),
            offset_deg: wrap_degrees(image.bearing_to(user) - self.sector_boresight(sector)),
        })
    }

    /// Area of one BS's hexagonal cell.
    pub fn cell_area_m2(&self) -> f64 {
        3f64.sqrt() / 2.0 * self.isd * self.isd
    }

    /// Area of the drop region: the union of all BS cells.
    pub fn region_area_m2(&self) -> f64 {
        self.cell_area_m2() * self.num_bs() as f64
    }

    /// Uniform point in the cell of a uniformly chosen BS.
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        let bs = rng.random_range(0..self.num_bs());
        let apothem = self.isd / 2.0;
        let circumradius = apothem * 2.0 / 3f64.sqrt();
        let normals = [0.0f64, 60.0, 120.0].map(|a| {
            let r = a.to_radians();
            (r.cos(), r.sin())
        });
        loop {
            let x = rng.random_range(-apothem..apothem);
            let y = rng.random_range(-circumradius..circumradius);
            if normals.iter().all(|&(nx, ny)| (x * nx + y * ny).abs() <= apothem) {
                return self.bs_positions[bs] + Point::new(x, y);
            }
        }
    }

    /// Index of the BS nearest to `p` under wraparound.
    pub fn nearest_bs(&self, p: Point) -> BsId {
        (0..self.num_bs())
            .map(BsId)
            .min_by(|&a, &b| {
                self.nearest_image(a, p)
                    .1
                    .total_cmp(&self.nearest_image(b, p).1)
            })
            .expect("layout has at least one BS")
    }

    /// Writes `bs_id,x_m,y_m,cluster_id` rows (1-based BS ids).
    pub fn write_positions_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["bs_id", "x_m", "y_m", "cluster_id"])?;
        for (b, p) in self.bs_positions.iter().enumerate() {
            w.write_record([
                (b + 1).to_string(),
                p.x.to_string(),
                p.y.to_string(),
                self.cluster_of[b].to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }

    pub fn cluster_size(&self) -> usize {
        self.cluster_size
    }
}

/// One realization of user positions.
#[derive(Debug, Clone, PartialEq)]
pub struct UserDrop {
    pub positions: Vec<Point>,
    /// Cluster of each user's nearest BS; used to pre-screen center candidates.
    pub candidate_cluster: Vec<usize>,
    pub density_per_km2: f64,
    pub seed: u64,
}

impl UserDrop {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// True when no user falls geographically inside the center cluster.
    pub fn is_empty_center(&self) -> bool {
        !self.candidate_cluster.contains(&0)
    }
}

/// Drops a Poisson number of users uniformly over the layout region.
pub fn drop_users(layout: &NetworkLayout, density_per_km2: f64, seed: u64) -> Result<UserDrop> {
    if !(density_per_km2.is_finite() && density_per_km2 > 0.0) {
        return Err(Error::Layout(format!(
            "user density must be positive, got {density_per_km2}"
        )));
    }
    let mut rng = seed::rng(seed);
    let mean = density_per_km2 * layout.region_area_m2() * 1e-6;
    let count = Poisson::new(mean)
        .map_err(|e| Error::Layout(format!("poisson mean {mean}: {e}")))?
        .sample(&mut rng) as usize;
    let positions: Vec<Point> = (0..count).map(|_| layout.sample_point(&mut rng)).collect();
    let candidate_cluster = positions
        .iter()
        .map(|&p| layout.cluster_of(layout.nearest_bs(p)))
        .collect();
    Ok(UserDrop {
        positions,
        candidate_cluster,
        density_per_km2,
        seed,
    })
}
