use std::fs;
use std::process::{Command, Output};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polar-perm")).args(args).output().unwrap()
}

#[test]
fn encode_then_decode_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let msg = dir.path().join("msg.txt");
    let llr = dir.path().join("frame.llr");
    let bits = "1011001110001111010101100110";
    fs::write(&msg, bits).unwrap();
    let code = ["--N", "64", "--K", "36", "--crc", "crc8"];
    let mut enc = vec!["encode"];
    enc.extend(code);
    enc.extend(["--message", msg.to_str().unwrap(), "--ebno", "4", "--seed", "3", "--out", llr.to_str().unwrap()]);
    assert!(cli(&enc).status.success());
    assert_eq!(fs::read_to_string(&llr).unwrap().lines().count(), 64);
    for decoder in ["bp", "sc", "pbp-cs"] {
        let mut dec = vec!["decode"];
        dec.extend(code);
        dec.extend(["--input", llr.to_str().unwrap(), "--decoder", decoder]);
        let out = cli(&dec);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), bits);
    }
}

#[test]
fn noiseless_codeword_bits() {
    let out = cli(&["encode", "--N", "8", "--K", "5", "--design-ebno", "0", "--seed", "1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 8);
    assert!(text.lines().all(|l| l == "0" || l == "1"));
}

#[test]
fn search_then_simulate_with_selected_set() {
    let dir = tempfile::tempdir().unwrap();
    let perms = dir.path().join("best.txt");
    let out = cli(&[
        "search-perms", "--N", "64", "--K", "32", "--crc", "crc8", "--k", "3", "--M", "4", "--ebno", "2",
        "--frames", "60", "--seed", "8", "--imax", "60", "--out", perms.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&perms).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("n=6 k=3"));
    assert_eq!(lines.next().unwrap().split(" score=").next().unwrap(), "0 1 2 3 4 5");
    assert_eq!(text.lines().count(), 5);

    for decoder in ["pbp-b", "psc-b"] {
        let out = cli(&[
            "simulate", "--N", "64", "--K", "32", "--crc", "crc8", "--decoder", decoder, "--perms-file",
            perms.to_str().unwrap(), "--M", "3", "--ebno-start", "2", "--ebno-stop", "2",
            "--min-frame-errors", "5", "--imax", "60",
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let csv = String::from_utf8(out.stdout).unwrap();
        assert!(csv.starts_with("ebno_db,frames,frame_errors,bit_errors,fer,ber,avg_iterations,avg_latency_timesteps,avg_perms_attempted\n"));
        assert_eq!(csv.lines().count(), 2);
    }
}

#[test]
fn configuration_errors_exit_nonzero() {
    for args in [
        &["simulate", "--N", "60", "--K", "30"][..],
        &["simulate", "--N", "64", "--K", "32", "--decoder", "pbp-b"],
        &["simulate", "--N", "64", "--K", "32", "--ebno-start", "3", "--ebno-stop", "1"],
        &["simulate", "--N", "64", "--K", "4", "--crc", "crc8"],
        &["simulate", "--N", "64", "--K", "32", "--term", "crc"],
        &["decode", "--N", "64", "--K", "32", "--input", "/nonexistent"],
    ] {
        let out = cli(args);
        assert!(!out.status.success(), "{args:?} succeeded");
        assert!(!out.stderr.is_empty());
    }
}
