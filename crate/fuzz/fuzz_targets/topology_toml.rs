#![no_main]

use covertnet::netsim::Topology;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(t) = Topology::from_toml(text) {
        let again = Topology::from_toml(&t.to_toml()).expect("printed topology reparses");
        assert_eq!(again, t);
        let _ = t.is_connected();
    }
});
