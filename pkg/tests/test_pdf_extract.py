from __future__ import annotations

import pytest

import oracles
from helpers import classic_pdf, minimal_bodies
from pdfannot.pdf import SyntheticPage, TextPlacement, build_pdf, extract_token_layout


def boxes_of(pdf: bytes, index: int = 0):
    layout = extract_token_layout(pdf)[index]
    return [
        (t.text, (t.bounds.left, t.bounds.top, t.bounds.right, t.bounds.bottom))
        for t in layout.tokens
    ]


def raw_page(content: bytes, fonts=None, **kwargs) -> bytes:
    page = SyntheticPage(raw_content=content, fonts=fonts or {"F1": "Helvetica"}, **kwargs)
    return build_pdf([page])


def assert_close(got, expected, tol=1e-3):
    assert len(got) == len(expected), f"{[t for t, _ in got]} != {[t for t, _ in expected]}"
    for (text, box), (want_text, want_box) in zip(got, expected):
        assert text == want_text
        for a, b in zip(box, want_box):
            assert abs(a - b) <= tol, f"{text}: {box} vs {want_box}"


class TestBaseline:
    def test_hello_world(self):
        pdf = build_pdf([SyntheticPage(placements=[TextPlacement(72.0, 700.0, "Hello World")])])
        layout, = extract_token_layout(pdf)
        assert (layout.page.width, layout.page.height) == (612.0, 792.0)
        assert_close(
            boxes_of(pdf),
            [
                ("Hello", (72.0, 83.384, 99.336, 94.484)),
                ("World", (102.672, 83.384, 134.004, 94.484)),
            ],
            tol=5e-4,
        )

    def test_courier_fixed_pitch(self):
        pdf = build_pdf(
            [SyntheticPage(placements=[TextPlacement(100.0, 100.0, "fixed width", font="Courier", size=8.0)])]
        )
        (t1, b1), (t2, b2) = boxes_of(pdf)
        assert (t1, t2) == ("fixed", "width")
        # every glyph advances 600/1000 * 8 = 4.8pt
        assert b1[2] - b1[0] == pytest.approx(5 * 4.8, abs=1e-3)
        assert b2[0] == pytest.approx(100.0 + 6 * 4.8, abs=1e-3)

    def test_empty_page(self):
        layout, = extract_token_layout(build_pdf([SyntheticPage()]))
        assert layout.tokens == []
        assert layout.page.width == 612.0

    def test_multi_page_indices(self):
        pages = [
            SyntheticPage(placements=[TextPlacement(72, 700, f"page{i}")]) for i in range(3)
        ]
        layouts = extract_token_layout(build_pdf(pages))
        assert [l.page.index for l in layouts] == [0, 1, 2]
        assert [l.tokens[0].text for l in layouts] == ["page0", "page1", "page2"]


class TestAgainstOracle:
    CASES = [
        SyntheticPage(placements=[TextPlacement(72, 700, "The quick brown fox", font="Times-Roman", size=10.0)]),
        SyntheticPage(placements=[TextPlacement(50, 500, "Mixed CASE text!", font="Helvetica-Bold", size=14.0)]),
        SyntheticPage(placements=[TextPlacement(30, 300, "spa ced", char_spacing=0.4, word_spacing=1.2)]),
        SyntheticPage(rotate=90, placements=[TextPlacement(72, 700, "turned right")]),
        SyntheticPage(rotate=180, placements=[TextPlacement(72, 700, "upside down")]),
        SyntheticPage(rotate=270, placements=[TextPlacement(72, 700, "turned left")]),
        SyntheticPage(
            width=400,
            height=300,
            placements=[
                TextPlacement(10, 250, "one two", font="Courier-Bold", size=9.0),
                TextPlacement(10, 230, "three", font="Times-BoldItalic", size=11.0),
            ],
        ),
        SyntheticPage(placements=[TextPlacement(72, 700, "symbols here", font="Symbol")]),
    ]

    @pytest.mark.parametrize("page", CASES, ids=lambda p: f"rot{p.rotate}-{p.placements[0].font}")
    def test_matches_independent_box_computation(self, page):
        layout, = extract_token_layout(build_pdf([page]))
        expected = oracles.expected_tokens(page)
        assert (layout.page.width, layout.page.height) == oracles.expected_page_size(page)
        got = [
            (t.text, (t.bounds.left, t.bounds.top, t.bounds.right, t.bounds.bottom))
            for t in layout.tokens
        ]
        assert_close(got, expected, tol=1e-3)

    @pytest.mark.parametrize("compress", [False, True])
    @pytest.mark.parametrize("embed_widths", [False, True])
    def test_writer_options_do_not_change_tokens(self, compress, embed_widths):
        page = SyntheticPage(placements=[TextPlacement(72, 700, "Stable output")])
        pdf = build_pdf([page], compress=compress, embed_widths=embed_widths)
        assert_close(boxes_of(pdf), oracles.expected_tokens(page), tol=1e-3)


class TestTextOperators:
    def test_tj_array_kern_splits_on_large_gap(self):
        pdf = raw_page(b"BT /F1 12 Tf 1 0 0 1 72 700 Tm [(A) -2000 (B)] TJ ET")
        assert_close(
            boxes_of(pdf),
            [
                ("A", (72.0, 83.384, 80.004, 94.484)),
                ("B", (104.004, 83.384, 112.008, 94.484)),
            ],
        )

    def test_tj_array_small_kern_keeps_token(self):
        pdf = raw_page(b"BT /F1 12 Tf 1 0 0 1 72 700 Tm [(A) -100 (B)] TJ ET")
        assert_close(boxes_of(pdf), [("AB", (72.0, 83.384, 89.208, 94.484))])

    def test_char_spacing_applies_between_glyphs(self):
        pdf = raw_page(b"BT /F1 12 Tf 1 Tc 1 0 0 1 72 700 Tm (AB) Tj ET")
        # second glyph starts one extra point to the right
        (_, box), = boxes_of(pdf)
        assert box[2] == pytest.approx(72.0 + 8.004 + 1.0 + 8.004, abs=1e-3)

    def test_word_spacing_only_hits_spaces(self):
        pdf = raw_page(b"BT /F1 12 Tf 6 Tw 1 0 0 1 72 700 Tm (A B) Tj ET")
        (_, a), (_, b) = boxes_of(pdf)
        assert b[0] == pytest.approx(a[2] + 3.336 + 6.0, abs=1e-3)

    def test_horizontal_scaling(self):
        pdf = raw_page(b"BT /F1 12 Tf 50 Tz 1 0 0 1 72 700 Tm (AB) Tj ET")
        assert_close(boxes_of(pdf), [("AB", (72.0, 83.384, 80.004, 94.484))])

    def test_rise_shifts_baseline(self):
        pdf = raw_page(b"BT /F1 12 Tf 1 0 0 1 72 700 Tm 5 Ts (A) Tj ET")
        assert_close(boxes_of(pdf), [("A", (72.0, 78.384, 80.004, 89.484))])

    def test_leading_and_t_star(self):
        pdf = raw_page(b"BT /F1 10 Tf 14 TL 1 0 0 1 72 700 Tm (One) Tj T* (Two) Tj ET")
        (t1, b1), (t2, b2) = boxes_of(pdf)
        assert (t1, t2) == ("One", "Two")
        assert b2[1] - b1[1] == pytest.approx(14.0, abs=1e-3)

    def test_td_uppercase_sets_leading(self):
        pdf = raw_page(b"BT /F1 10 Tf 72 700 Td (A) Tj 0 -20 TD (B) Tj T* (C) Tj ET")
        tokens = boxes_of(pdf)
        tops = [b[1] for _, b in tokens]
        assert tops[1] - tops[0] == pytest.approx(20.0, abs=1e-3)
        assert tops[2] - tops[1] == pytest.approx(20.0, abs=1e-3)

    def test_quote_operators(self):
        pdf = raw_page(b"BT /F1 10 Tf 12 TL 72 700 Td (one) Tj (two) ' 4 0 (three) \" ET")
        texts = [t for t, _ in boxes_of(pdf)]
        assert texts == ["one", "two", "three"]

    def test_double_quote_sets_spacing_state(self):
        # " sets word spacing 30 and char spacing 0 before showing
        pdf = raw_page(b"BT /F1 12 Tf 12 TL 72 700 Td 30 0 (a b) \" ET")
        (_, a), (_, b) = boxes_of(pdf)
        assert b[0] == pytest.approx(a[2] + 3.336 + 30.0, abs=1e-3)

    def test_render_mode_3_still_emits(self):
        pdf = raw_page(b"BT /F1 12 Tf 3 Tr 1 0 0 1 72 700 Tm (Ghost) Tj ET")
        assert [t for t, _ in boxes_of(pdf)] == ["Ghost"]

    def test_baseline_jump_splits_token(self):
        pdf = raw_page(b"BT /F1 12 Tf 1 0 0 1 72 700 Tm (ab) Tj 0.5 -3 Td (cd) Tj ET")
        texts = [t for t, _ in boxes_of(pdf)]
        assert texts == ["ab", "cd"]

    def test_zero_size_text_is_dropped(self):
        pdf = raw_page(b"BT /F1 0 Tf 1 0 0 1 72 700 Tm (void) Tj /F1 12 Tf (real) Tj ET")
        assert [t for t, _ in boxes_of(pdf)] == ["real"]

    def test_text_before_font_selection_is_skipped(self, caplog):
        pdf = raw_page(b"BT 1 0 0 1 72 700 Tm (lost) Tj /F1 12 Tf (found) Tj ET")
        assert [t for t, _ in boxes_of(pdf)] == ["found"]
        assert any("before any font" in r.message for r in caplog.records)


class TestMatrices:
    def test_cm_scaling(self):
        pdf = raw_page(b"q 2 0 0 2 0 0 cm BT /F1 12 Tf 1 0 0 1 50 300 Tm (Hi) Tj ET Q")
        assert_close(boxes_of(pdf), [("Hi", (100.0, 174.768, 122.656, 196.968))])

    def test_cm_rotation_keeps_run_together(self):
        pdf = raw_page(b"q 0 1 -1 0 200 100 cm BT /F1 12 Tf (Up) Tj ET Q")
        assert_close(boxes_of(pdf), [("Up", (191.384, 676.664, 202.484, 692.0))])

    def test_direction_change_splits(self):
        content = (
            b"BT /F1 12 Tf 1 0 0 1 72 700 Tm (ab) Tj ET "
            b"q 0 1 -1 0 300 96 cm BT /F1 12 Tf (cd) Tj ET Q"
        )
        texts = [t for t, _ in boxes_of(raw_page(content))]
        assert texts == ["ab", "cd"]

    def test_tm_with_rotation_inside_text_object(self):
        pdf = raw_page(b"BT /F1 12 Tf 0 1 -1 0 300 100 Tm (rot) Tj ET")
        (text, box), = boxes_of(pdf)
        assert text == "rot"
        # vertical run: narrow in x, long in y
        assert box[3] - box[1] > box[2] - box[0]


class TestFormXObjects:
    def form_pdf(self, outer: bytes, form_content: bytes, matrix: bytes = b"[1 0 0 1 100 0]") -> bytes:
        bodies = {
            1: b"<< /Type /Catalog /Pages 2 0 R >>",
            2: b"<< /Type /Pages /Kids [3 0 R] /Count 1 /MediaBox [0 0 612 792] >>",
            3: b"<< /Type /Page /Parent 2 0 R /Contents 4 0 R /Resources << "
               b"/Font << /F1 5 0 R >> /XObject << /X1 6 0 R >> >> >>",
            4: b"<< /Length %d >>\nstream\n%s\nendstream" % (len(outer), outer),
            5: b"<< /Type /Font /Subtype /Type1 /BaseFont /Helvetica /Encoding /WinAnsiEncoding >>",
            6: b"<< /Type /XObject /Subtype /Form /Matrix %s /BBox [0 0 612 792] "
               b"/Resources << /Font << /F1 5 0 R >> >> /Length %d >>\nstream\n%s\nendstream"
               % (matrix, len(form_content), form_content),
        }
        return classic_pdf(bodies, root=1)

    def test_form_matrix_offsets_tokens(self):
        pdf = self.form_pdf(
            outer=b"BT /F1 12 Tf 1 0 0 1 72 700 Tm (Out) Tj ET /X1 Do",
            form_content=b"BT /F1 12 Tf 1 0 0 1 50 50 Tm (In) Tj ET",
        )
        tokens = dict(boxes_of(pdf))
        assert set(tokens) == {"Out", "In"}
        assert tokens["In"][0] == pytest.approx(150.0, abs=1e-3)

    def test_form_boundary_breaks_runs(self):
        # the form continues exactly where the outer text stopped; adjacency
        # must not merge across the Do boundary
        pdf = self.form_pdf(
            outer=b"BT /F1 12 Tf 1 0 0 1 72 700 Tm (AB) Tj ET /X1 Do",
            form_content=b"BT /F1 12 Tf 1 0 0 1 88.008 700 Tm (CD) Tj ET",
            matrix=b"[1 0 0 1 0 0]",
        )
        texts = [t for t, _ in boxes_of(pdf)]
        assert texts == ["AB", "CD"]

    def test_self_referencing_form_terminates(self):
        bodies = {
            1: b"<< /Type /Catalog /Pages 2 0 R >>",
            2: b"<< /Type /Pages /Kids [3 0 R] /Count 1 /MediaBox [0 0 612 792] >>",
            3: b"<< /Type /Page /Parent 2 0 R /Contents 4 0 R /Resources << "
               b"/Font << /F1 5 0 R >> /XObject << /X1 6 0 R >> >> >>",
            4: b"<< /Length 6 >>\nstream\n/X1 Do\nendstream",
            5: b"<< /Type /Font /Subtype /Type1 /BaseFont /Helvetica /Encoding /WinAnsiEncoding >>",
            6: b"<< /Type /XObject /Subtype /Form /BBox [0 0 10 10] /Resources << "
               b"/XObject << /X1 6 0 R >> >> /Length 27 >>\nstream\nBT (x) Tj ET /X1 Do /X1 Do\nendstream",
        }
        layouts = extract_token_layout(classic_pdf(bodies, root=1))
        assert layouts[0].tokens == []  # no font selected inside; must not hang


class TestEdgeClamping:
    def test_small_overhang_is_clamped(self):
        pdf = build_pdf([SyntheticPage(placements=[TextPlacement(-5.0, 700.0, "Hug")])])
        (text, box), = boxes_of(pdf)
        assert text == "Hug"
        assert box[0] == -2.0

    def test_within_slack_is_untouched(self):
        pdf = build_pdf([SyntheticPage(placements=[TextPlacement(-1.0, 700.0, "Hug")])])
        (_, box), = boxes_of(pdf)
        assert box[0] == -1.0

    def test_fully_outside_token_is_dropped(self, caplog):
        pdf = build_pdf(
            [SyntheticPage(placements=[
                TextPlacement(-300.0, 700.0, "gone"),
                TextPlacement(72.0, 700.0, "kept"),
            ])]
        )
        assert [t for t, _ in boxes_of(pdf)] == ["kept"]
        assert any("outside the page" in r.message for r in caplog.records)

    def test_crop_box_shifts_origin(self):
        content = b"BT /F1 12 Tf 1 0 0 1 172 600 Tm (Shift) Tj ET"
        bodies = {
            1: b"<< /Type /Catalog /Pages 2 0 R >>",
            2: b"<< /Type /Pages /Kids [3 0 R] /Count 1 >>",
            3: b"<< /Type /Page /Parent 2 0 R /MediaBox [0 0 612 792] "
               b"/CropBox [100 100 400 700] /Contents 4 0 R "
               b"/Resources << /Font << /F1 5 0 R >> >> >>",
            4: b"<< /Length %d >>\nstream\n%s\nendstream" % (len(content), content),
            5: b"<< /Type /Font /Subtype /Type1 /BaseFont /Helvetica /Encoding /WinAnsiEncoding >>",
        }
        layout, = extract_token_layout(classic_pdf(bodies, root=1))
        assert (layout.page.width, layout.page.height) == (300.0, 600.0)
        (text, box), = boxes_of(classic_pdf(bodies, root=1))
        # x: 172 - 100 = 72; top: 600 - (600 - 100) - ascent... measured from crop top
        assert box[0] == pytest.approx(72.0, abs=1e-3)
        assert box[1] == pytest.approx(600.0 - 500.0 - 8.616, abs=1e-3)


class TestFonts:
    def font_pdf(self, font_body: bytes, content: bytes, extra=None) -> bytes:
        bodies = {
            1: b"<< /Type /Catalog /Pages 2 0 R >>",
            2: b"<< /Type /Pages /Kids [3 0 R] /Count 1 /MediaBox [0 0 612 792] >>",
            3: b"<< /Type /Page /Parent 2 0 R /Contents 4 0 R /Resources << "
               b"/Font << /F1 5 0 R /F2 9 0 R >> >> >>",
            4: b"<< /Length %d >>\nstream\n%s\nendstream" % (len(content), content),
            5: font_body,
            9: b"<< /Type /Font /Subtype /Type1 /BaseFont /Helvetica /Encoding /WinAnsiEncoding >>",
        }
        bodies.update(extra or {})
        return classic_pdf(bodies, root=1)

    def test_type3_font_skips_run_but_not_page(self, caplog):
        pdf = self.font_pdf(
            b"<< /Type /Font /Subtype /Type3 /CharProcs << >> /FontMatrix [0.001 0 0 0.001 0 0] >>",
            b"BT /F1 12 Tf 1 0 0 1 72 700 Tm (skipped) Tj ET "
            b"BT /F2 12 Tf 1 0 0 1 72 600 Tm (visible) Tj ET",
        )
        assert [t for t, _ in boxes_of(pdf)] == ["visible"]
        assert any("skipping text" in r.message for r in caplog.records)

    def test_embedded_widths_and_differences(self):
        pdf = self.font_pdf(
            b"<< /Type /Font /Subtype /Type1 /BaseFont /Custom /FirstChar 65 /LastChar 66 "
            b"/Widths [600 700] /FontDescriptor 8 0 R /Encoding << /Type /Encoding "
            b"/BaseEncoding /WinAnsiEncoding /Differences [65 /fi 66 /emdash] >> >>",
            b"BT /F1 10 Tf 1 0 0 1 72 700 Tm (AB) Tj ET",
            extra={8: b"<< /Type /FontDescriptor /FontName /Custom /Ascent 800 /Descent -200 /Flags 32 >>"},
        )
        assert_close(boxes_of(pdf), [("ﬁ—", (72.0, 84.0, 85.0, 94.0))])

    def test_tounicode_beats_encoding(self):
        cmap = (
            b"begincmap\n1 beginbfchar\n<41> <0058>\nendbfchar\nendcmap"
        )
        pdf = self.font_pdf(
            b"<< /Type /Font /Subtype /Type1 /BaseFont /Helvetica "
            b"/Encoding /WinAnsiEncoding /ToUnicode 8 0 R >>",
            b"BT /F1 12 Tf 1 0 0 1 72 700 Tm (A) Tj ET",
            extra={8: b"<< /Length %d >>\nstream\n%s\nendstream" % (len(cmap), cmap)},
        )
        assert [t for t, _ in boxes_of(pdf)] == ["X"]

    def test_identity_h_composite_font(self):
        cmap = (
            b"begincmap\n"
            b"2 beginbfchar\n<0001> <0041>\n<0002> <0042>\nendbfchar\n"
            b"1 beginbfrange\n<0003> <0004> <0043>\nendbfrange\n"
            b"endcmap"
        )
        pdf = self.font_pdf(
            b"<< /Type /Font /Subtype /Type0 /BaseFont /TestCID /Encoding /Identity-H "
            b"/DescendantFonts [6 0 R] /ToUnicode 7 0 R >>",
            b"BT /F1 12 Tf 1 0 0 1 72 700 Tm <000100020003> Tj ET",
            extra={
                6: b"<< /Type /Font /Subtype /CIDFontType2 /BaseFont /TestCID /DW 600 "
                   b"/W [1 [500 700]] /FontDescriptor 8 0 R >>",
                7: b"<< /Length %d >>\nstream\n%s\nendstream" % (len(cmap), cmap),
                8: b"<< /Type /FontDescriptor /FontName /TestCID /Ascent 700 /Descent -250 /Flags 4 >>",
            },
        )
        assert_close(boxes_of(pdf), [("ABC", (72.0, 83.6, 93.6, 95.0))])

    def test_identity_v_is_skipped_with_warning(self, caplog):
        pdf = self.font_pdf(
            b"<< /Type /Font /Subtype /Type0 /BaseFont /TestCID /Encoding /Identity-V "
            b"/DescendantFonts [6 0 R] >>",
            b"BT /F1 12 Tf 1 0 0 1 72 700 Tm <0001> Tj ET",
            extra={6: b"<< /Type /Font /Subtype /CIDFontType2 /BaseFont /TestCID /DW 600 >>"},
        )
        assert boxes_of(pdf) == []
        assert any("skipping text" in r.message for r in caplog.records)

    def test_missing_font_resource_warns_once(self, caplog):
        pdf = self.font_pdf(
            b"<< /Type /Font /Subtype /Type1 /BaseFont /Helvetica >>",
            b"BT /F9 12 Tf (lost) Tj (more) Tj /F2 12 Tf 1 0 0 1 72 700 Tm (ok) Tj ET",
        )
        assert [t for t, _ in boxes_of(pdf)] == ["ok"]
        misses = [r for r in caplog.records if "F9" in r.message]
        assert len(misses) == 1
