use vadef::cocycle::*;
use vadef::deform::*;
use vadef::library::{virasoro, Param};
use vadef::pbw::GeneratorId;

fn main() {
    let spec = virasoro(Param::Symbolic("c".into()));
    let table = DefTable::new(&spec);
    let def = DefEngine::new(&table);
    let w = GeneratorId(0);
    let vac = spec.vacuum_state();
    for m in -2..=4i64 {
        for n in -2..=4i64 {
            let s = commutator_residual_on(&def, w, w, m, n, &vac).unwrap();
            if !s.is_zero() {
                println!("(m,n)=({m},{n}):");
                for (mono, f) in s.iter() {
                    println!("   {} : {}", mono.render(&spec.gen_names()), f.render(|id| table.unknowns.label(id).to_string()));
                }
            }
        }
    }
}
