#![no_main]

use covertnet::protocols::Transcript;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(t) = Transcript::from_jsonl(text) {
        let again = Transcript::from_jsonl(&t.to_jsonl()).expect("printed transcript reparses");
        assert_eq!(again.messages(), t.messages());
        assert_eq!(again.covert_bits(), t.covert_bits());
    }
});
