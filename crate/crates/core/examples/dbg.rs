use vadef::library::*;
use vadef::algebra::*;
use vadef::scalar::*;
fn main() {
    let specs: Vec<(&str, AlgebraSpec)> = vec![
        ("virasoro-sym", virasoro(Param::Symbolic("c".into()))),
        ("virasoro-1", virasoro(Param::Value(rat_int(1)))),
        ("heis3", heisenberg(3, Param::Symbolic("l".into())).unwrap()),
        ("sl2", affine(&LieData::sl2(), Param::Symbolic("l".into())).unwrap()),
        ("w3-sym", w3(Param::Symbolic("c".into())).unwrap()),
        ("w3-pole", w3(Param::Value(rat(-22, 5))).unwrap()),
    ];
    for (name, spec) in specs {
        let cap = default_validation_cap(&spec);
        match validate_algebra(&spec, cap) {
            Ok(rep) => {
                if rep.is_clean() { println!("{name}: clean (cap {cap})"); }
                else {
                    println!("{name}: {} violations", rep.violations.len());
                    for v in rep.violations.iter().take(5) { println!("   {v}"); }
                }
            }
            Err(e) => println!("{name}: engine error {e}"),
        }
        let text = render_algebra_file(&spec);
        match parse_algebra_file(&text) {
            Ok(_) => println!("{name}: round trip ok"),
            Err(e) => { println!("{name}: round trip FAILED: {e}"); println!("--- file ---\n{text}---"); }
        }
    }
}
