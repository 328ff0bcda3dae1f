#![no_main]

use covertnet::bfk::BfkRunDescription;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(d) = BfkRunDescription::from_json(text) {
        assert_eq!(BfkRunDescription::from_json(&d.to_json()).expect("printed description reparses"), d);
        let p = d.pattern().expect("validated");
        assert_eq!(p.measurement_order().len(), d.n * d.m);
    }
});
