use colog_core::fixtures::{run_bundled, BUNDLED};

#[test]
fn bundled_fixtures_pass() {
    for b in &BUNDLED {
        let run = run_bundled(b.name).unwrap();
        print!("{}", run.render());
        assert!(run.passed(), "{}", run.render());
    }
}
