//! Export to DIMACS, solve with the bundled DPLL, decode the model back
//! into a certificate. Any external SAT solver can stand in for the DPLL.

use morphic::cnf::{dpll, encode, CnfInstance};
use morphic::PrimeSet;

fn main() -> morphic::Result<()> {
    let p0 = PrimeSet::parse("2,3,5")?;
    for limit in [532, 533] {
        let inst = encode(&p0, 2, limit)?;
        let text = inst.to_dimacs();
        let back = CnfInstance::from_dimacs(&text)?;
        assert_eq!(back, inst);
        print!(
            "[1,{limit}]: {} variables, {} clauses  ",
            inst.num_vars(),
            inst.clauses.len()
        );
        match dpll(back.num_vars(), &back.clauses) {
            Some(model) => {
                let cert = back.decode(&model)?;
                println!("SAT, decoded certificate colors {} variables", cert.coloring.assignment().len());
            }
            None => println!("UNSAT"),
        }
    }
    Ok(())
}
