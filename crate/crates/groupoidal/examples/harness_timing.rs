use groupoidal::{axioms::axiom_harness, backends::*};
use std::time::Instant;
fn main() {
    for (name, s) in [
        ("finset", finset_sample(3, false)),
        ("fintop-homeo", fintop_sample(3, false, true)),
        ("fintop-labeled", fintop_sample(3, false, false)),
    ] {
        let t = Instant::now();
        println!("{name}: {} objects {} maps", s.objects.len(), s.maps.len());
        match axiom_harness(&s, usize::MAX) {
            Ok(o) => println!("{} instances, {:?}\n{}", o.instances, t.elapsed(), o.report),
            Err(e) => println!("{e}"),
        }
    }
}
