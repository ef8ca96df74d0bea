use std::ffi::CStr;
use std::ptr;

use equitangent_ffi::*;

fn last_error() -> String {
    let p = et_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn random_chain_round_trip() {
    let mut chain = ptr::null_mut();
    assert_eq!(et_chain_random(6, 7, &mut chain), EtStatus::Ok);
    let n = et_chain_len(chain);
    assert_eq!(n, 6);

    let mut rank = 0;
    assert_eq!(et_chain_bracket_rank(chain, 1e-4, &mut rank), EtStatus::Ok);
    assert_eq!(rank, 12);

    let (mut vel, mut rates) = (vec![0.0; 2 * n], vec![0.0; n]);
    assert_eq!(et_chain_kernel_field(chain, vel.as_mut_ptr(), rates.as_mut_ptr()), EtStatus::Ok);
    assert!(vel.iter().all(|v| v.abs() < 1e-10));
    assert!(rates.iter().all(|r| (r + 2.0).abs() < 1e-10));

    let mut fp = ptr::null_mut();
    assert_eq!(et_chain_to_framed(chain, &mut fp), EtStatus::Ok);
    let mut res = 1.0;
    assert_eq!(et_framed_max_residual(fp, &mut res), EtStatus::Ok);
    assert!(res < 1e-9);

    let mut back = ptr::null_mut();
    assert_eq!(et_framed_to_chain(fp, 1e-9, &mut back), EtStatus::Ok);
    let (mut a, mut ra) = (vec![0.0; 2 * n], vec![0.0; n]);
    let (mut b, mut rb) = (vec![0.0; 2 * n], vec![0.0; n]);
    assert_eq!(et_chain_get(chain, a.as_mut_ptr(), ra.as_mut_ptr()), EtStatus::Ok);
    assert_eq!(et_chain_get(back, b.as_mut_ptr(), rb.as_mut_ptr()), EtStatus::Ok);
    for (x, y) in a.iter().chain(&ra).zip(b.iter().chain(&rb)) {
        assert!((x - y).abs() < 1e-8);
    }

    // rebuild from the copied arrays
    let mut copy = ptr::null_mut();
    assert_eq!(et_chain_new(a.as_ptr(), ra.as_ptr(), n, 1e-9, &mut copy), EtStatus::Ok);
    assert_eq!(et_chain_len(copy), n);

    et_chain_free(copy);
    et_chain_free(back);
    et_framed_free(fp);
    et_chain_free(chain);
}

#[test]
fn framing_of_a_pentagon() {
    let xy = [0.0, 0.0, 2.0, 0.1, 2.5, 1.5, 1.0, 2.5, -0.5, 1.2];
    let mut fp = ptr::null_mut();
    assert_eq!(et_framed_from_polygon(xy.as_ptr(), 5, 1e-9, &mut fp), EtStatus::Ok);
    assert_eq!(et_framed_len(fp), 5);
    let (mut v, mut d) = ([0.0; 10], [0.0; 5]);
    assert_eq!(et_framed_get(fp, v.as_mut_ptr(), d.as_mut_ptr()), EtStatus::Ok);
    assert_eq!(v, xy);

    let mut again = ptr::null_mut();
    assert_eq!(et_framed_new(xy.as_ptr(), d.as_ptr(), 5, 1e-9, &mut again), EtStatus::Ok);
    d[2] += 0.2;
    let mut bad = ptr::null_mut();
    assert_eq!(et_framed_new(xy.as_ptr(), d.as_ptr(), 5, 1e-9, &mut bad), EtStatus::Precondition);
    assert!(bad.is_null());
    assert!(!last_error().is_empty());

    et_framed_free(again);
    et_framed_free(fp);
}

#[test]
fn even_obstruction() {
    // square is cyclic, the kite below is not
    let square = [1.0, 0.0, 0.0, 1.0, -1.0, 0.0, 0.0, -1.0];
    let mut ob = 1.0;
    assert_eq!(et_framing_obstruction_even(square.as_ptr(), 4, &mut ob), EtStatus::Ok);
    assert!(ob.abs() < 1e-12);
    let kite = [1.5, 0.0, 0.0, 1.0, -1.0, 0.0, 0.0, -1.0];
    assert_eq!(et_framing_obstruction_even(kite.as_ptr(), 4, &mut ob), EtStatus::Ok);
    assert!(ob.abs() > 1e-3);
    let tri = [0.0, 0.0, 1.0, 0.0, 0.0, 1.0];
    assert_eq!(et_framing_obstruction_even(tri.as_ptr(), 3, &mut ob), EtStatus::Precondition);
}

#[test]
fn spectrum_ratio_for_pentagons() {
    let mut buf = [0.0; 4];
    let mut len = 0;
    assert_eq!(et_spectrum(5, buf.as_mut_ptr(), buf.len(), &mut len), EtStatus::Ok);
    assert_eq!(len, 2);
    let (mut a, mut b) = (buf[0].abs(), buf[1].abs());
    if a > b {
        std::mem::swap(&mut a, &mut b);
    }
    assert!((a / b - (5f64.sqrt() - 2.0)).abs() < 1e-12);

    let mut small = [0.0; 1];
    assert_eq!(et_spectrum(5, small.as_mut_ptr(), 1, &mut len), EtStatus::InvalidInput);
    assert_eq!(len, 2);
}

#[test]
fn bicentric_triangle() {
    let (big_r, r) = (2.0f64, 0.7);
    let d = (big_r * big_r - 2.0 * big_r * r).sqrt();
    let mut res = 1.0;
    assert_eq!(et_euler_fuss_residual(3, big_r, r, d, &mut res), EtStatus::Ok);
    assert!(res.abs() < 1e-12);
    let mut defect = 1.0;
    assert_eq!(et_poncelet_closure(3, big_r, r, d, 0.4, &mut defect), EtStatus::Ok);
    assert!(defect < 1e-9);
}

#[test]
fn bigon_rank_is_five() {
    let mut rank = 0;
    assert_eq!(et_bigon_rank(0.3, -0.2, 1.1, 0.6, 0.4, 1e-3, &mut rank), EtStatus::Ok);
    assert_eq!(rank, 5);
}

#[test]
fn errors_and_nulls() {
    let mut chain = ptr::null_mut();
    assert_eq!(et_chain_random(3, 0, &mut chain), EtStatus::Precondition);
    assert!(chain.is_null());
    assert_eq!(et_chain_random(5, 0, ptr::null_mut()), EtStatus::NullPointer);
    assert!(last_error().contains("result"));
    let mut rank = 0;
    assert_eq!(et_chain_bracket_rank(ptr::null(), 1e-4, &mut rank), EtStatus::NullPointer);
    assert_eq!(et_chain_len(ptr::null()), 0);
    et_chain_free(ptr::null_mut());
    et_framed_free(ptr::null_mut());
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/equitangent.h");
    for name in [
        "et_last_error",
        "et_chain_new",
        "et_chain_random",
        "et_chain_free",
        "et_chain_len",
        "et_chain_get",
        "et_chain_bracket_rank",
        "et_chain_kernel_field",
        "et_chain_to_framed",
        "et_framed_from_polygon",
        "et_framed_new",
        "et_framed_free",
        "et_framed_len",
        "et_framed_get",
        "et_framed_max_residual",
        "et_framed_to_chain",
        "et_framing_obstruction_even",
        "et_spectrum",
        "et_poncelet_closure",
        "et_euler_fuss_residual",
        "et_bigon_rank",
        "ET_STATUS_NULL_POINTER",
        "typedef struct EtChain EtChain",
    ] {
        assert!(header.contains(name), "{name} missing");
    }
}
