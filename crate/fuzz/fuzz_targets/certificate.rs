#![no_main]

use libfuzzer_sys::fuzz_target;
use vdw::{verify, VdwCertificate};

fuzz_target!(|text: &str| {
    if let Ok(cert) = VdwCertificate::parse(text) {
        assert_eq!(verify(cert.witness(), cert.k()).unwrap(), None);
        let again = VdwCertificate::parse(&cert.render()).expect("rendered certificates parse");
        assert_eq!(again, cert);
    }
});
