use locorth_core::classify::enumerate_classes;
use locorth_core::scenario::Scenario;
use locorth_core::search::SearchBudget;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let n: usize = args[1].parse().unwrap();
    let m: usize = args[2].parse().unwrap();
    let d: usize = args[3].parse().unwrap();
    let s = Scenario::new(n, m, d).unwrap();
    let t0 = std::time::Instant::now();
    let classes = enumerate_classes(&s, &mut SearchBudget::default()).unwrap();
    println!("({n},{m},{d}): {} classes in {:.1?}", classes.len(), t0.elapsed());
    for c in &classes {
        println!("  {} terms, {} members", c.representative.terms(), c.members);
    }
}
