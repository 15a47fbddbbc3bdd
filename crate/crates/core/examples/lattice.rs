//! Dyadic lattices, covers of a ball, and the farthest-pair shrink.

use gp_bnb::lattice::{
    check_lattice_conditions, covering_number, enclosing_ball, farthest_pair, BoxDomain, DyadicLattice, Region,
};

fn main() -> gp_bnb::error::Result<()> {
    let lat = DyadicLattice::new(BoxDomain::unit(2), 6)?;
    println!("finest grid: {} points per axis, {} in total", lat.resolution() + 1, lat.size());
    for depth in 0..=3 {
        println!("depth {depth}: {} points, cell diameter {:.4}", lat.indices_at_depth(depth)?.len(), lat.cell_diameter(depth));
    }

    let region = Region::new(vec![0.4, 0.6], 0.2)?;
    for delta in [0.25, 0.125, 0.0625] {
        let cover = lat.cover_points(&region, delta)?;
        println!(
            "cover of B((0.4, 0.6), 0.2) at delta {delta}: {} points (N(rho, delta) = {})",
            cover.len(),
            covering_number(0.2, delta, 2)
        );
    }

    let pts = vec![vec![0.25, 0.5], vec![0.5, 0.75], vec![0.375, 0.5], vec![0.5, 0.5]];
    let (i, j, dist) = farthest_pair(&pts).expect("non-empty");
    let next = enclosing_ball(&pts[i], &pts[j]);
    println!("farthest pair {:?} - {:?} at distance {dist:.4}", pts[i], pts[j]);
    println!("next region: center {:?}, radius {:.4}", next.center, next.radius);

    let cond = check_lattice_conditions(&lat, 0.1)?;
    println!("\nlattice conditions for rho0 = 0.1: {cond:?}");
    Ok(())
}
