use std::process::Command;

fn lbb(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_lbb")).args(args).output().unwrap()
}

#[test]
fn constants_to_stdout() {
    let out = lbb(&["constants", "--elements", "taylor_hood", "--levels", "4,8"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "element,pattern,n,h,beta_lbb,c_glbb,c_inv_v,c_inv_p,c_fit,status");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("taylor_hood,diagonal,4,3.53553390593e-1,"));
    assert!(lines[2].starts_with("taylor_hood,diagonal,8,1.76776695297e-1,"));
}

#[test]
fn reruns_are_byte_identical_and_written_to_out() {
    let dir = std::env::temp_dir().join(format!("lbb-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let common = ["--elements", "mini,p1p1", "--levels", "3,5", "--pattern", "crisscross", "--seed", "7"];
    for (cmd, extra) in [
        ("constants", &[][..]),
        ("eps-sweep", &["--eps", "0.01,1", "--limits"][..]),
        ("fortin", &["--fields", "v_star,interpolant"][..]),
    ] {
        let mut files = Vec::new();
        for run in 0..2 {
            let path = dir.join(format!("{cmd}-{run}.csv"));
            let mut args = vec![cmd];
            args.extend(common);
            args.extend(extra);
            let p = path.to_str().unwrap().to_string();
            args.extend(["--out", &p]);
            let out = lbb(&args);
            assert!(out.status.success(), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
            files.push(std::fs::read(&path).unwrap());
        }
        assert_eq!(files[0], files[1], "{cmd}");
        assert!(!files[0].contains(&b'\r'));
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn flagged_levels_do_not_fail_the_run() {
    let out = lbb(&["fortin", "--elements", "p1p1", "--levels", "4"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("GLBB hypothesis violated at this level"));
}

#[test]
fn bad_config_is_rejected() {
    assert_eq!(lbb(&["constants", "--levels", "8,4"]).status.code(), Some(2));
    assert_eq!(lbb(&["eps-sweep", "--eps", "-1"]).status.code(), Some(2));
    assert!(!lbb(&["constants", "--elements", "q2q1"]).status.success());
    assert!(!lbb(&["nonsense"]).status.success());
}
