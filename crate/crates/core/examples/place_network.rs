//! Random cell-free and colocated layouts and their distance matrices.

use rscf::geometry::{distances, place_network, Topology};
use rscf::rng::{stream, Purpose};

fn main() -> rscf::Result<()> {
    for topology in [Topology::CellFree, Topology::CentralBs] {
        let layout = place_network(6, 3, 600.0, topology, &mut stream(1, Purpose::Layout, 0, 0))?;
        println!("{topology:?}");
        for (m, ap) in layout.ap_positions.iter().enumerate() {
            println!("  AP {m}: ({:6.1}, {:6.1})", ap.x, ap.y);
        }
        for (k, ue) in layout.ue_positions.iter().enumerate() {
            println!("  UE {k}: ({:6.1}, {:6.1})", ue.x, ue.y);
        }
        println!("  distances [m]:\n{:.1}", distances(&layout).d);
    }
    Ok(())
}
