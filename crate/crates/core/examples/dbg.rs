use lcgm::geometry::{dset_sequence, support_polytope, Sample};
use lcgm::graph::Graph;
use lcgm::Rat;

fn r(v: i64) -> Rat {
    Rat::from_integer(v.into())
}

fn main() {
    let g = Graph::new(4, &[(1, 2), (2, 3), (3, 4), (1, 4)]).unwrap();
    let pts: Vec<Vec<Rat>> = vec![
        vec![r(7), r(2), r(8), r(0)],
        vec![r(3), r(7), r(9), r(3)],
        vec![r(7), r(9), r(8), r(4)],
        vec![r(8), r(0), r(1), r(8)],
    ];
    let x = Sample::uniform(pts).unwrap();
    let t0 = std::time::Instant::now();
    let s = support_polytope(&g, &x);
    println!("support vertices: {} ({:?})", s.vertices().len(), t0.elapsed());
    let t0 = std::time::Instant::now();
    let ds = dset_sequence(&g, &x, 64).unwrap();
    println!(
        "stabilized at {:?}, steps {}, time {:?}",
        ds.stabilized_at,
        ds.steps.len(),
        t0.elapsed()
    );
    for (i, st) in ds.steps.iter().enumerate() {
        println!("  D^{}: {} vertices, vol {}", i, st.vertices().len(), ds.volumes[i]);
    }
    let last = ds.steps.last().unwrap();
    println!("final == support: {}", last.equal(&s));
    for v in last.vertices() {
        let strs: Vec<String> = v.iter().map(lcgm::scalar::rat_to_string).collect();
        println!("  ({})", strs.join(", "));
    }
}
