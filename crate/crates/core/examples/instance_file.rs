//! Writing, reading and checking an instance file.

use majorant::generators::{random_commuting_instance, stream, SpectrumProfile};
use majorant::harness::{check_instance, parse_instance, CheckOptions, InstanceFile, Relation};
use majorant::Result;

fn main() -> Result<()> {
    let inst = random_commuting_instance(2, 2, &mut stream(9, 0, "file-example"), SpectrumProfile::Uniform)?;
    let text = serde_json::to_string(&InstanceFile::from_instance(&inst)).expect("serializable");
    println!("{text}");

    let back = parse_instance(&text)?;
    for relation in [Relation::Theorem1, Relation::Lemma1, Relation::EigProduct] {
        let report = check_instance(&back, &CheckOptions { relation, ..CheckOptions::default() })?;
        println!("{relation}: {:?}, min margin {:.3e}", report.verdict, report.min_margin());
    }

    let bad = r#"{"d": 2, "K": 1, "pairs": [{"A": {"re": [[1, 0], [0, 0]]}, "B": {"re": [[1, 1], [1, 1]]}}]}"#;
    match parse_instance(bad) {
        Ok(_) => println!("unexpectedly accepted"),
        Err(e) => println!("rejected: {e}"),
    }
    Ok(())
}
