//! Builds a neighborhood graph on a uniform sample, reports connectivity and
//! degree statistics, and writes the edge list.
//!
//! cargo run --release --example build_graph -- [n] [d]

use lapsmooth::estimator::connectivity_radius;
use lapsmooth::graph::{build_graph, graph_diagnostics, max_degree_envelope};
use lapsmooth::kernel::KernelSpec;
use lapsmooth::synthetic::{sample_design, DesignSpec, Domain};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let n: usize = args
        .next()
        .map_or(2000, |s| s.parse().expect("n must be an integer"));
    let d: usize = args
        .next()
        .map_or(2, |s| s.parse().expect("d must be an integer"));

    let design = DesignSpec::uniform(d, Domain::Unit).with_seed(1);
    let points = sample_design(&design, n)?;
    let r = connectivity_radius(n, d, 2.0);
    let g = build_graph(&points, r, &KernelSpec::uniform(d))?;
    let mut diag = graph_diagnostics(&g);

    let x1: Vec<f64> = points.iter().map(|x| x[0]).collect();
    diag.add_seminorm_sample(&g, "x_1", &x1)?;

    println!("n = {n}, d = {d}, r = {r:.4}");
    println!(
        "edges {}, components {}, connected {}",
        diag.edge_count, diag.components, diag.connected
    );
    let (_, p_max) = design.density_bounds();
    println!(
        "max degree {:.2} (envelope n p_max r^d = {:.2})",
        diag.max_degree,
        max_degree_envelope(n, r, d, p_max)
    );
    for (id, v) in &diag.seminorm_samples {
        println!("f'Lf for {id}: {v:.3}");
    }

    let path = std::env::temp_dir().join("lapsmooth_edges.csv");
    g.write_edge_list(std::io::BufWriter::new(std::fs::File::create(&path)?))?;
    println!("edge list written to {}", path.display());
    Ok(())
}
