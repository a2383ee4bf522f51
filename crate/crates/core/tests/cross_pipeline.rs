//! Cross-pipeline agreement: interpreting a digital object directly and
//! recognizing a scan of its rendering must produce the same canonical
//! structure for every discrete format.

mod common;

use contident::format::builtin_registry;
use contident::identity::{identical, Verdict};
use contident::interpret::{digital_interpret, recognize};
use contident::projection::{
    physical_project, write_carrier, DigitalObject, PhysicalProjectionMethod,
};
use contident::raster::Scale;

#[test]
fn digital_and_recognized_interpretations_agree() {
    let reg = builtin_registry();
    let fx = common::cross_pipeline_fixtures();
    assert!(fx.len() >= 20);
    for f in &fx {
        let obj = DigitalObject::new(f.bytes.clone(), f.type_tag);
        let direct = digital_interpret(&obj, &reg, f.format).unwrap();
        let carrier = write_carrier(&direct, &reg, f.format, f.font, 700).unwrap();
        let img = physical_project(&carrier, &PhysicalProjectionMethod::plain_scan(Scale::ONE));
        let scanned = recognize(&img, &reg, f.format).unwrap();
        let verdict = identical(&direct, &scanned).unwrap();
        assert_eq!(
            verdict.value,
            Verdict::Identical,
            "fixture {:?} ({:?}) diverged: {:?}",
            f.name,
            String::from_utf8_lossy(&f.bytes),
            verdict.diff
        );
    }
}

#[test]
fn encoding_does_not_affect_identity() {
    // The same characters carried under three byte encodings interpret to
    // the same canonical structure, even though the byte streams differ.
    let reg = builtin_registry();
    let text = "Same text, three codes.";
    let ascii = DigitalObject::new(text.as_bytes().to_vec(), "text/plain;charset=ascii");
    let latin1 = DigitalObject::new(
        text.chars().map(|c| c as u8).collect::<Vec<u8>>(),
        "text/plain;charset=latin1",
    );
    let utf8 = DigitalObject::new(text.as_bytes().to_vec(), "text/plain;charset=utf8");
    let a = digital_interpret(&ascii, &reg, "PLAIN_LATIN").unwrap();
    let b = digital_interpret(&latin1, &reg, "PLAIN_LATIN").unwrap();
    let c = digital_interpret(&utf8, &reg, "PLAIN_LATIN").unwrap();
    assert_eq!(identical(&a, &b).unwrap().value, Verdict::Identical);
    assert_eq!(identical(&b, &c).unwrap().value, Verdict::Identical);
}
