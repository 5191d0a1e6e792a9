use cornercase::catalog;
use cornercase::effects::{
    apply_dead_pixels, apply_overexposure, read_ppm, write_ppm, EffectError, PixelMask, RgbImage, BLACK,
};
use image::Rgb;
use proptest::prelude::*;

fn gradient(w: u32, h: u32) -> RgbImage {
    RgbImage::from_fn(w, h, |x, y| {
        Rgb([(x * 4) as u8, (y * 4) as u8, ((x + y) * 2) as u8])
    })
}

/// Same gradient shifted so no channel is zero (no pixel starts out black).
fn lit_gradient(w: u32, h: u32) -> RgbImage {
    RgbImage::from_fn(w, h, |x, y| {
        Rgb([(x * 3 + 1) as u8, (y * 3 + 1) as u8, ((x + y) + 1) as u8])
    })
}

fn changed(a: &RgbImage, b: &RgbImage) -> usize {
    a.pixels().zip(b.pixels()).filter(|(p, q)| p != q).count()
}

#[test]
fn one_dead_pixel_on_white() {
    let img = RgbImage::from_pixel(4, 4, Rgb([255, 255, 255]));
    let mask = PixelMask::new(4, 4, [(0, 0)]).unwrap();
    let out = apply_dead_pixels(&img, &mask).unwrap();
    assert_eq!(out.get_pixel(0, 0), &Rgb(BLACK));
    assert_eq!(changed(&img, &out), 1);
    assert!(out
        .enumerate_pixels()
        .filter(|(x, y, _)| (*x, *y) != (0, 0))
        .all(|(_, _, p)| *p == Rgb([255; 3])));
}

#[test]
fn empty_and_out_of_bounds_masks_are_rejected() {
    assert_eq!(PixelMask::new(4, 4, []).unwrap_err(), EffectError::EmptyMask);
    assert!(matches!(
        PixelMask::new(4, 4, [(4, 0)]),
        Err(EffectError::OutOfBounds { x: 4, y: 0, .. })
    ));
}

#[test]
fn mask_must_match_the_image() {
    let mask = PixelMask::new(4, 4, [(1, 1)]).unwrap();
    let err = apply_dead_pixels(&gradient(8, 4), &mask).unwrap_err();
    assert_eq!(
        err,
        EffectError::DimensionMismatch {
            mask_w: 4,
            mask_h: 4,
            image_w: 8,
            image_h: 4,
        }
    );
}

#[test]
fn dead_pixels_are_idempotent_and_exact_on_64x64() {
    let img = lit_gradient(64, 64);
    let pixels: Vec<(u32, u32)> = (0..64)
        .map(|i| (i, (i * 7) % 64))
        .chain([(5, 60), (63, 0)])
        .collect();
    let mask = PixelMask::new(64, 64, pixels).unwrap();
    let once = apply_dead_pixels(&img, &mask).unwrap();
    let twice = apply_dead_pixels(&once, &mask).unwrap();
    assert_eq!(once, twice);
    assert_eq!(changed(&img, &once), mask.len());
    assert_eq!(once.dimensions(), img.dimensions());
}

#[test]
fn fill_value_is_configurable() {
    let img = gradient(4, 4);
    let mask = PixelMask::new(4, 4, [(2, 3)]).unwrap().with_fill([255, 255, 255]);
    assert_eq!(
        apply_dead_pixels(&img, &mask).unwrap().get_pixel(2, 3),
        &Rgb([255, 255, 255])
    );
}

#[test]
fn overexposure_matches_a_scalar_oracle_on_a_gradient() {
    let img = gradient(64, 64);
    // Gain 2 is exact in integers.
    let out = apply_overexposure(&img, 2.0, 255).unwrap();
    for (x, y, p) in img.enumerate_pixels() {
        for c in 0..3 {
            let v = u32::from(p[c]);
            assert_eq!(
                u32::from(out.get_pixel(x, y)[c]),
                (2 * v).min(255),
                "({x},{y})[{c}]"
            );
        }
    }
    // A fractional gain against floor(v*g + 1/2), a second rounding recipe.
    let gain = 1.37;
    let clamp = 200u8;
    let out = apply_overexposure(&img, gain, clamp).unwrap();
    for (x, y, p) in img.enumerate_pixels() {
        for c in 0..3 {
            let expected = (f64::from(p[c]) * gain + 0.5).floor().min(f64::from(clamp)) as u8;
            assert_eq!(out.get_pixel(x, y)[c], expected, "({x},{y})[{c}]");
        }
    }
}

#[test]
fn mid_gray_doubles() {
    let img = RgbImage::from_pixel(8, 8, Rgb([100, 100, 100]));
    let out = apply_overexposure(&img, 2.0, 255).unwrap();
    assert!(out.pixels().all(|p| *p == Rgb([200, 200, 200])));
}

#[test]
fn huge_gain_saturates_a_lit_image() {
    let img = lit_gradient(16, 16);
    let out = apply_overexposure(&img, 1e6, 255).unwrap();
    assert!(out.pixels().all(|p| *p == Rgb([255, 255, 255])));
}

#[test]
fn gain_must_exceed_one() {
    let img = gradient(2, 2);
    for g in [1.0, 0.5, -2.0, f64::NAN, f64::INFINITY] {
        assert!(
            matches!(apply_overexposure(&img, g, 255), Err(EffectError::BadGain(_))),
            "{g}"
        );
    }
}

#[test]
fn ppm_round_trip() {
    let img = gradient(13, 7);
    let bytes = write_ppm(&img).unwrap();
    assert!(bytes.starts_with(b"P6"));
    assert_eq!(read_ppm(&bytes).unwrap(), img);
    assert!(read_ppm(b"P3 garbage").is_err());
}

#[test]
fn directive_round_trip_and_catalog_mask() {
    let mask = PixelMask::parse_directive(&catalog::dead_pixel_directive()).unwrap();
    assert_eq!((mask.width(), mask.height()), (800, 600));
    assert_eq!(mask.len(), 12);
    assert_eq!(mask.fill(), BLACK);
    assert_eq!(PixelMask::parse_directive(&mask.to_directive()).unwrap(), mask);
    let frame = RgbImage::from_pixel(800, 600, Rgb([90, 140, 200]));
    assert_eq!(changed(&frame, &apply_dead_pixels(&frame, &mask).unwrap()), 12);
}

#[test]
fn directive_errors_carry_line_numbers() {
    let bad = "DEADPIXELS/1\nsize 4 4\n# comment\npx 1 one\n";
    assert!(matches!(
        PixelMask::parse_directive(bad),
        Err(EffectError::Directive { line: 4, .. })
    ));
    assert!(matches!(
        PixelMask::parse_directive("PIXELS\n"),
        Err(EffectError::Directive { line: 1, .. })
    ));
    assert!(matches!(
        PixelMask::parse_directive("DEADPIXELS/1\npx 0 0\n"),
        Err(EffectError::Directive { .. })
    ));
    assert_eq!(
        PixelMask::parse_directive("DEADPIXELS/1\nsize 2 2\n").unwrap_err(),
        EffectError::EmptyMask
    );
}

fn image_strategy() -> impl Strategy<Value = RgbImage> {
    (1u32..12, 1u32..12).prop_flat_map(|(w, h)| {
        prop::collection::vec(any::<u8>(), (w * h * 3) as usize)
            .prop_map(move |raw| RgbImage::from_raw(w, h, raw).unwrap())
    })
}

fn image_and_mask() -> impl Strategy<Value = (RgbImage, PixelMask)> {
    image_strategy().prop_flat_map(|img| {
        let (w, h) = img.dimensions();
        prop::collection::btree_set((0..w, 0..h), 1..=((w * h) as usize).min(20))
            .prop_map(move |px| (img.clone(), PixelMask::new(w, h, px).unwrap()))
    })
}

proptest! {
    #[test]
    fn dead_pixels_change_only_masked_non_black_pixels((img, mask) in image_and_mask()) {
        let out = apply_dead_pixels(&img, &mask).unwrap();
        prop_assert_eq!(out.dimensions(), img.dimensions());
        prop_assert_eq!(apply_dead_pixels(&out, &mask).unwrap(), out.clone());
        let already_black = mask.dead_pixels().iter().filter(|&&(x, y)| img.get_pixel(x, y) == &Rgb(BLACK)).count();
        prop_assert_eq!(changed(&img, &out), mask.len() - already_black);
        for (x, y, p) in out.enumerate_pixels() {
            if mask.dead_pixels().contains(&(x, y)) {
                prop_assert_eq!(*p, Rgb(BLACK));
            } else {
                prop_assert_eq!(p, img.get_pixel(x, y));
            }
        }
    }

    #[test]
    fn overexposure_never_darkens_at_full_clamp(img in image_strategy(), gain in 1.0001f64..8.0) {
        let out = apply_overexposure(&img, gain, 255).unwrap();
        prop_assert_eq!(out.dimensions(), img.dimensions());
        for (a, b) in img.as_raw().iter().zip(out.as_raw()) {
            prop_assert!(b >= a);
        }
    }

    #[test]
    fn overexposure_respects_clamp(img in image_strategy(), gain in 1.0001f64..8.0, clamp in any::<u8>()) {
        let out = apply_overexposure(&img, gain, clamp).unwrap();
        prop_assert!(out.as_raw().iter().all(|&v| v <= clamp));
    }

    #[test]
    fn directive_text_round_trips((_, mask) in image_and_mask(), fill in any::<[u8; 3]>()) {
        let mask = mask.with_fill(fill);
        prop_assert_eq!(PixelMask::parse_directive(&mask.to_directive()).unwrap(), mask);
    }

    #[test]
    fn ppm_round_trips(img in image_strategy()) {
        prop_assert_eq!(read_ppm(&write_ppm(&img).unwrap()).unwrap(), img);
    }
}
