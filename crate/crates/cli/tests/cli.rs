use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_umlmine")).args(args).output().unwrap()
}

fn f(name: &str) -> String {
    fixture(name).to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn generate_singleton_matches_fixture() {
    let out = stdout(&run(&["generate", &f("singleton.xmi"), "--stereotypes"]));
    assert_eq!(out, std::fs::read_to_string(fixture("singleton.rq")).unwrap());

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("q.rq");
    stdout(&run(&["generate", &f("singleton.xmi"), "--stereotypes", "-o", path.to_str().unwrap()]));
    assert_eq!(std::fs::read_to_string(path).unwrap(), out);
}

#[test]
fn generate_flags() {
    let out = stdout(&run(&["generate", &f("singleton.xmi"), "--stereotypes", "--suppress-visibility"]));
    for v in ["woc:Public", "woc:Private", "woc:Protected"] {
        assert!(!out.contains(v), "{out}");
    }
    let out = stdout(&run(&["generate", &f("visitor.xmi"), "--suppress-visibility"]));
    let select = out.lines().find(|l| l.starts_with("SELECT")).unwrap();
    assert_eq!(select.split_whitespace().filter(|w| w.starts_with('?')).count(), 15);

    let out = stdout(&run(&["generate", &f("two_methods.xmi"), "--no-distinct-filters", "--limit", "3"]));
    assert!(!out.contains("FILTER"), "{out}");
    assert!(out.contains("LIMIT 3"), "{out}");

    let o = run(&["generate", &f("singleton.xmi"), "-v"]);
    assert!(stderr(&o).contains("node(s)"));
}

#[test]
fn generate_rejects_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.xmi");
    std::fs::write(&path, "<not-xmi").unwrap();
    let o = run(&["generate", path.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(!stderr(&o).is_empty());
}

#[test]
fn mine_inheritance() {
    let o = run(&["mine", &f("inheritance.rq"), &f("corpus.nt"), "--time", "--debug"]);
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("ClassA1 | ClassB2"));
    let rows: Vec<&str> = lines.collect();
    assert!(rows.iter().any(|r| r.contains("corpus/Animal>") && r.contains("corpus/Dog>")), "{out}");
    let err = stderr(&o);
    assert!(err.contains("Time: ") && err.contains(" ms"), "{err}");
    assert!(err.contains("plan for"), "{err}");

    let limited = stdout(&run(&["mine", &f("inheritance.rq"), &f("corpus.nt"), "--limit", "1"]));
    assert_eq!(limited.lines().count(), 2);
    assert_eq!(limited.lines().nth(1), Some(rows[0]));
}

#[test]
fn mine_batch_and_errors() {
    let out = stdout(&run(&[
        "mine",
        &f("singleton.rq"),
        &f("corpus.nt"),
        "--query",
        &f("inheritance.rq"),
    ]));
    assert_eq!(out.lines().filter(|l| l.starts_with("# ")).count(), 2);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("opt.rq");
    std::fs::write(&path, "SELECT ?a WHERE { ?a ?b ?c OPTIONAL { ?a ?b ?d } }").unwrap();
    let o = run(&["mine", path.to_str().unwrap(), &f("corpus.nt")]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("OPTIONAL"), "{}", stderr(&o));

    let o = run(&["mine", &f("singleton.rq")]);
    assert!(!o.status.success());
}

#[test]
fn facts_command() {
    let out = stdout(&run(&["facts", &f("singleton.json"), "--base-iri", "http://example.org/singleton/"]));
    assert_eq!(out.lines().count(), 15);
    assert_eq!(out, std::fs::read_to_string(fixture("singleton.nt")).unwrap());

    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.json");
    std::fs::write(&empty, "{}").unwrap();
    let target = dir.path().join("empty.nt");
    stdout(&run(&["facts", empty.to_str().unwrap(), "--base-iri", "urn:x/", "-o", target.to_str().unwrap()]));
    assert_eq!(std::fs::read_to_string(target).unwrap(), "");

    let dangling = dir.path().join("dangling.json");
    std::fs::write(
        &dangling,
        r#"{"types":[{"name":"A","kind":"class","fields":[{"name":"f","type":"Missing"}],"methods":[{"name":"m","references":["A.nope"]}]}]}"#,
    )
    .unwrap();
    let o = run(&["facts", dangling.to_str().unwrap(), "--base-iri", "urn:x/"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("A.nope"), "{}", stderr(&o));
}

#[test]
fn eval_table_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let results = dir.path().join("singleton.txt");
    let table = stdout(&run(&["mine", &f("singleton.rq"), &f("corpus.nt")]));
    std::fs::write(&results, table).unwrap();
    let r = results.to_str().unwrap();

    let out = stdout(&run(&["eval", "-t", &f("truth/singleton.json"), "-r", r]));
    assert!(out.contains("Singleton"), "{out}");
    assert!(out.lines().last().unwrap().starts_with("average"), "{out}");
    assert!(out.contains("100.00%"), "{out}");

    let json: serde_json::Value = serde_json::from_str(&stdout(&run(&[
        "eval",
        "-t",
        &f("truth/singleton.json"),
        "-r",
        r,
        "--json",
    ])))
    .unwrap();
    assert_eq!(json["meanPrecision"], 1.0);
    assert_eq!(json["reports"][0]["truePositives"], 1);

    let o = run(&["eval", "-t", &f("truth/singleton.json"), "-t", &f("truth/proxy.json"), "-r", r]);
    assert!(!o.status.success());
}
