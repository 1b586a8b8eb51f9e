use std::path::PathBuf;
use std::time::Instant;

use period_atlas::aronhold::InvariantPair;

fn main() {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("data"));
    let start = Instant::now();
    let (pair, reports) = InvariantPair::derive().expect("derivation");
    for r in &reports {
        println!("degree {}: {} monomials, kernel dimension {}", r.degree, r.basis_size, r.kernel_dimension);
    }
    println!("S has {} terms, T has {} terms", pair.s.num_terms(), pair.t.num_terms());
    for p in pair.write(&out).expect("write") {
        println!("wrote {}", p.display());
    }
    println!("elapsed {:.1?}", start.elapsed());
}
