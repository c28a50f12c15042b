//! Network layouts: distributed single-antenna APs (cell-free) or a colocated
//! array at the area centre, plus uniformly dropped users.

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Topology {
    /// APs spread uniformly over the area.
    CellFree,
    /// All antennas colocated at the area centre.
    CentralBs,
}

impl Topology {
    pub fn short_name(self) -> &'static str {
        match self {
            Topology::CellFree => "CF",
            Topology::CentralBs => "BS",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkLayout {
    pub ap_positions: Vec<Point>,
    pub ue_positions: Vec<Point>,
    pub area_side: f64,
    /// AP height above ground (m). Only enters the attenuation constant.
    pub h_ap: f64,
    /// UE height above ground (m). Only enters the attenuation constant.
    pub h_u: f64,
    pub topology: Topology,
}

impl NetworkLayout {
    pub const DEFAULT_H_AP: f64 = 15.0;
    pub const DEFAULT_H_U: f64 = 1.65;

    pub fn num_aps(&self) -> usize {
        self.ap_positions.len()
    }

    pub fn num_users(&self) -> usize {
        self.ue_positions.len()
    }

    pub fn with_heights(mut self, h_ap: f64, h_u: f64) -> Self {
        self.h_ap = h_ap;
        self.h_u = h_u;
        self
    }

    pub fn centre(&self) -> Point {
        Point::new(self.area_side / 2.0, self.area_side / 2.0)
    }
}

/// Drops `m` APs and `k` users in the `[0, area_side]^2` square.
///
/// For [`Topology::CentralBs`] every AP sits at the centre and only the users
/// consume randomness. Users are drawn after the APs so the two topologies
/// place users from different points of the stream; pairing across topologies
/// is not attempted.
pub fn place_network<R: Rng + ?Sized>(
    m: usize,
    k: usize,
    area_side: f64,
    topology: Topology,
    rng: &mut R,
) -> Result<NetworkLayout> {
    if m == 0 {
        return Err(Error::config("m", "at least one AP is required"));
    }
    if k == 0 {
        return Err(Error::config("k", "at least one user is required"));
    }
    if !(area_side.is_finite() && area_side > 0.0) {
        return Err(Error::config("area_side", format!("must be positive, got {area_side}")));
    }
    let uniform_point = |rng: &mut R| Point::new(rng.random::<f64>() * area_side, rng.random::<f64>() * area_side);
    let ap_positions = match topology {
        Topology::CellFree => (0..m).map(|_| uniform_point(rng)).collect(),
        Topology::CentralBs => vec![Point::new(area_side / 2.0, area_side / 2.0); m],
    };
    let ue_positions = (0..k).map(|_| uniform_point(rng)).collect();
    Ok(NetworkLayout {
        ap_positions,
        ue_positions,
        area_side,
        h_ap: NetworkLayout::DEFAULT_H_AP,
        h_u: NetworkLayout::DEFAULT_H_U,
        topology,
    })
}

/// Horizontal AP-to-user distances, `M x K`.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix {
    pub d: DMatrix<f64>,
    pub topology: Topology,
}

impl DistanceMatrix {
    pub fn num_aps(&self) -> usize {
        self.d.nrows()
    }

    pub fn num_users(&self) -> usize {
        self.d.ncols()
    }
}

pub fn distances(layout: &NetworkLayout) -> DistanceMatrix {
    let d = DMatrix::from_fn(layout.num_aps(), layout.num_users(), |m, k| {
        layout.ap_positions[m].distance(&layout.ue_positions[k])
    });
    DistanceMatrix {
        d,
        topology: layout.topology,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Purpose};

    fn layout_with(aps: Vec<Point>, ues: Vec<Point>, topology: Topology) -> NetworkLayout {
        NetworkLayout {
            ap_positions: aps,
            ue_positions: ues,
            area_side: 600.0,
            h_ap: 15.0,
            h_u: 1.65,
            topology,
        }
    }

    #[test]
    fn cell_free_points_stay_in_area() {
        let mut rng = stream(11, Purpose::Layout, 0, 0);
        let layout = place_network(6, 3, 600.0, Topology::CellFree, &mut rng).unwrap();
        assert_eq!(layout.num_aps(), 6);
        assert_eq!(layout.num_users(), 3);
        for p in layout.ap_positions.iter().chain(&layout.ue_positions) {
            assert!((0.0..=600.0).contains(&p.x) && (0.0..=600.0).contains(&p.y));
        }
    }

    #[test]
    fn central_bs_is_colocated() {
        let mut rng = stream(11, Purpose::Layout, 0, 0);
        let layout = place_network(4, 2, 600.0, Topology::CentralBs, &mut rng).unwrap();
        assert!(layout.ap_positions.iter().all(|p| *p == Point::new(300.0, 300.0)));
    }

    #[test]
    fn same_seed_same_layout() {
        let a = place_network(6, 3, 600.0, Topology::CellFree, &mut stream(5, Purpose::Layout, 2, 0)).unwrap();
        let b = place_network(6, 3, 600.0, Topology::CellFree, &mut stream(5, Purpose::Layout, 2, 0)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_arguments() {
        let mut rng = stream(1, Purpose::Layout, 0, 0);
        assert!(matches!(place_network(0, 3, 600.0, Topology::CellFree, &mut rng), Err(Error::Config { key, .. }) if key == "m"));
        assert!(matches!(place_network(6, 0, 600.0, Topology::CellFree, &mut rng), Err(Error::Config { key, .. }) if key == "k"));
        assert!(place_network(6, 3, 0.0, Topology::CellFree, &mut rng).is_err());
        assert!(place_network(6, 3, -1.0, Topology::CellFree, &mut rng).is_err());
    }

    #[test]
    fn distance_examples() {
        let layout = layout_with(vec![Point::new(0.0, 0.0)], vec![Point::new(3.0, 4.0), Point::new(0.0, 0.0)], Topology::CellFree);
        let d = distances(&layout);
        assert_eq!(d.d[(0, 0)], 5.0);
        assert_eq!(d.d[(0, 1)], 0.0);

        let bs = layout_with(vec![Point::new(300.0, 300.0); 4], vec![Point::new(300.0, 350.0)], Topology::CentralBs);
        let d = distances(&bs);
        assert!(d.d.iter().all(|&v| v == 50.0));
    }

    #[test]
    fn coordinate_means_are_centred() {
        let n = 10_000;
        let (mut sx, mut sy, mut count) = (0.0, 0.0, 0usize);
        for r in 0..n {
            let mut rng = stream(99, Purpose::Layout, r, 0);
            let layout = place_network(6, 3, 600.0, Topology::CellFree, &mut rng).unwrap();
            for p in layout.ap_positions.iter().chain(&layout.ue_positions) {
                sx += p.x;
                sy += p.y;
                count += 1;
            }
        }
        let (mx, my) = (sx / count as f64, sy / count as f64);
        assert!((mx / 300.0 - 1.0).abs() < 0.02, "{mx}");
        assert!((my / 300.0 - 1.0).abs() < 0.02, "{my}");
    }

    #[test]
    fn distances_permute_with_users() {
        let mut rng = stream(3, Purpose::Layout, 0, 0);
        let layout = place_network(5, 4, 600.0, Topology::CellFree, &mut rng).unwrap();
        let perm = [2, 0, 3, 1];
        let mut permuted = layout.clone();
        permuted.ue_positions = perm.iter().map(|&i| layout.ue_positions[i]).collect();
        let d = distances(&layout);
        let dp = distances(&permuted);
        for (col, &src) in perm.iter().enumerate() {
            assert_eq!(dp.d.column(col), d.d.column(src));
        }
    }
}
