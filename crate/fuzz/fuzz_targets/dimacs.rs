#![no_main]

use libfuzzer_sys::fuzz_target;
use vdw::cnf::Cnf;

fuzz_target!(|text: &str| {
    if let Ok(cnf) = Cnf::parse_dimacs(text) {
        let again = Cnf::parse_dimacs(&cnf.to_dimacs()).expect("rendered CNF parses");
        assert_eq!(again, cnf);
    }
});
