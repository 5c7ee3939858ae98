//! Prints the class counts of the exhaustive enumerations and the searched
//! exploration-sequence lengths, with timings.

fn main() {
    let t0 = std::time::Instant::now();
    for n in 2..=explore_core::enumerate::MAX_GRAPH_SIZE {
        let t = std::time::Instant::now();
        let bucket = explore_core::enumerate::graphs_of_size(n);
        println!(
            "graphs of size {n}: {:>7} classes  ({:.2?})",
            bucket.len(),
            t.elapsed()
        );
    }
    for n in 2..=explore_core::enumerate::MAX_TREE_SIZE {
        let bucket = explore_core::enumerate::trees_of_size(n);
        println!("trees  of size {n}: {:>7} classes", bucket.len());
    }
    for n in 2..=4 {
        let uxs = explore_core::uxs::search_uxs(n, 100_000).unwrap();
        println!("sequence for bound {n}: {} offsets", uxs.offsets.len());
    }
    println!("total {:.2?}", t0.elapsed());
}
