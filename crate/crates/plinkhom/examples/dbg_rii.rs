use plinkhom::gflin::Prime;
use plinkhom::rouquier::*;
use std::time::Instant;

fn probe(letters: Vec<i32>, strands: usize, p: u32) {
    let w = BraidWord::new(strands, letters.clone()).unwrap();
    let t0 = Instant::now();
    let c = braid_complex_minimal(&w, Prime::new(p).unwrap(), Convention::Generic).unwrap();
    let mut per: Vec<(i64, usize, usize)> = Vec::new();
    for (k, g) in &c.groups {
        let rank: usize = g.iter().map(|b| b.rank()).sum();
        per.push((*k, g.len(), rank));
    }
    println!(
        "word {:?} p={}: build {:?}, groups: {:?}",
        letters,
        p,
        t0.elapsed(),
        per
    );
    c.check_d_squared().unwrap();
}

fn main() {
    probe(vec![1, -2, 1, -2], 3, 5); // figure eight
    probe(vec![1, 1, 1, 1, 1], 2, 5); // T(2,5)
    probe(vec![1, 2, 1, 2], 3, 5); // T(3,3)-ish partial
    probe(vec![1, 1, 2, 2], 3, 5);
    probe(vec![1, 2, 3, 2, 1], 4, 5);
    probe(vec![1, 2, -1, 2], 3, 5);
}
