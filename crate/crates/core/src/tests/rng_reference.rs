//! Frozen draws. A change here means every recorded report changes too.

#![allow(clippy::excessive_precision)]

use crate::GaussianStream;

#[test]
fn first_normals_for_seed_42() {
    let got = GaussianStream::new(42).take(4);
    let want = [
        4.77981238351021742e-1,
        1.33407061023180784e0,
        -2.10866683271030281e-1,
        4.76346923808821321e-1,
    ];
    assert_eq!(got, want);
}

#[test]
fn trial_streams() {
    let got = GaussianStream::for_trial(42, 7, 3).take(3);
    assert_eq!(
        got,
        [-8.16860446564740661e-1, 2.83615272143005304e-1, -3.42380158424655356e-1]
    );
    assert_ne!(GaussianStream::for_trial(42, 7, 4).take(3), got);
    assert_ne!(GaussianStream::for_trial(42, 8, 3).take(3), got);
}

#[test]
fn uniform_draw() {
    assert_eq!(GaussianStream::new(0).uniform(), 7.09075415426561828e-1);
}
