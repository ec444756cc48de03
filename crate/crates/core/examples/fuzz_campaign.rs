//! A small seeded campaign over every relation, then an exact replay of one record.

use majorant::generators::GeneratorConfig;
use majorant::harness::{fuzz_relation, trial_record, FuzzOptions, Relation, TrialSpec};
use majorant::DEFAULT_TOL;

fn main() {
    let opts = FuzzOptions {
        relations: Relation::ALL.to_vec(),
        config: GeneratorConfig::default(),
        trials: 200,
        tol: DEFAULT_TOL,
        timing: false,
    };
    for &relation in &opts.relations {
        let (records, summary) = fuzz_relation(relation, &opts);
        println!(
            "{relation:10} {}/{} pass, min margin {:?} (trial {:?})",
            summary.passed, summary.trials, summary.min_margin, summary.tightest_trial
        );
        if relation == Relation::Theorem1 {
            let rec = &records[17];
            let spec = TrialSpec::draw(relation, rec.seed, rec.trial, &opts.config);
            let replay = trial_record(&spec, DEFAULT_TOL, false);
            println!(
                "replayed trial 17: d = {}, K = {}, {}; margins agree bitwise: {}",
                rec.d,
                rec.k,
                rec.profile,
                replay.min_margin.map(f64::to_bits) == rec.min_margin.map(f64::to_bits)
            );
        }
    }
}
