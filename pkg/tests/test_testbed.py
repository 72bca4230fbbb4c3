import pytest
from hypothesis import given, settings, strategies as st

from polysynth.testbed import (
    Channel,
    ContextError,
    InjectionContext,
    Reason,
    ScoreVector,
    Testbed,
    evaluate,
    evaluate_context,
    load_contexts,
    mutually_exclusive,
)

payload_text = st.text(
    alphabet=st.characters(min_codepoint=0x20, max_codepoint=0x7E), max_size=60
)


class TestLoadContexts:
    def test_anchor_body_template(self):
        src = 'context 0 anchor html-body\n  <a href="/x">{{INJ}}</a>\n'
        (ctx,) = load_contexts(src)
        assert ctx.channel is Channel.HTML_BODY
        assert ctx.name == "anchor"

    def test_missing_placeholder_rejected(self):
        src = "context 0 broken html-body\n  <p>nothing here</p>\n"
        with pytest.raises(ContextError, match="exactly once"):
            load_contexts(src)

    def test_double_placeholder_rejected(self):
        src = "context 0 broken html-body\n  <p>{{INJ}} {{INJ}}</p>\n"
        with pytest.raises(ContextError, match="exactly once"):
            load_contexts(src)

    def test_js_code_var_assignment(self):
        src = "context 0 jsvar js-code\n  var foo = {{INJ}};\n"
        (ctx,) = load_contexts(src)
        assert ctx.channel is Channel.JS_CODE
        assert ctx.mode == "jsfile"

    def test_channel_position_mismatch_rejected(self):
        src = 'context 0 wrong js-code\n  <p>{{INJ}}</p>\n'
        with pytest.raises(ContextError, match="does not match"):
            load_contexts(src)

    def test_ids_must_be_consecutive(self):
        src = (
            "context 0 a html-body\n  <p>{{INJ}}</p>\n"
            "context 2 b html-body\n  <p>{{INJ}}</p>\n"
        )
        with pytest.raises(ContextError, match="0..1"):
            load_contexts(src)

    def test_sentinel_in_template_rejected(self):
        src = "context 0 bad html-body\n  <p>xss() {{INJ}}</p>\n"
        with pytest.raises(ContextError, match="sentinel"):
            load_contexts(src)

    def test_default_catalog_loads_27(self, contexts):
        assert len(contexts) == 27
        assert [c.id for c in contexts] == list(range(27))
        used = {c.channel for c in contexts}
        assert used == set(Channel)


class TestEvaluateContext:
    def test_js_dquote_breakout(self, contexts):
        # quote close, paren close, empty block, call, comment break-in
        out = evaluate_context(contexts[2], '"){}xss();//')
        assert out.executed and out.reason is Reason.SENTINEL_REACHED

    def test_js_dquote_underflow_variant_fails(self, contexts):
        out = evaluate_context(contexts[2], '")}{xss();//')
        assert not out.executed

    def test_iframe_src_javascript_uri(self, contexts):
        out = evaluate_context(contexts[1], "javascript:xss()")
        assert out.executed

    def test_js_code_rejects_javascript_uri(self, contexts):
        out = evaluate_context(contexts[4], "javascript:xss()")
        assert not out.executed
        assert out.reason is Reason.SYNTAX_ERROR

    def test_empty_payload_not_reached(self, contexts):
        out = evaluate_context(contexts[0], "")
        assert not out.executed
        assert out.reason is Reason.NOT_REACHED

    def test_location_sink_navigation_away(self, contexts):
        out = evaluate_context(contexts[3], "https://example.org/")
        assert not out.executed
        assert out.reason is Reason.NAVIGATION_AWAY

    def test_location_sink_uri_case_and_spaces(self, contexts):
        assert evaluate_context(contexts[3], "  JavaScript:xss()  ").executed

    def test_sentinel_inert_in_plain_text(self, contexts):
        out = evaluate_context(contexts[0], "xss()")
        assert not out.executed
        assert out.reason is Reason.SENTINEL_INERT

    def test_trace_emitted_on_request(self, contexts):
        out = evaluate_context(contexts[0], "<script>xss()</script>", trace=True)
        assert out.executed
        assert out.trace and any("\t" in line for line in out.trace)
        assert evaluate_context(contexts[0], "<script>xss()</script>").trace is None

    def test_img_src_uri_never_executes(self, contexts):
        assert not evaluate_context(contexts[23], "javascript:xss()").executed

    def test_img_breakout_via_onerror_injection(self, contexts):
        assert evaluate_context(contexts[23], '" onerror="xss()').executed

    def test_script_src_attr_needs_new_element(self, contexts):
        assert not evaluate_context(contexts[22], "javascript:xss()").executed
        assert evaluate_context(
            contexts[22], '"></script><script>xss()</script>'
        ).executed

    def test_unclosed_script_never_executes(self, contexts):
        assert not evaluate_context(contexts[0], "<script>xss()").executed

    def test_handler_breakouts(self, contexts):
        assert evaluate_context(contexts[12], '");xss();//').executed
        assert evaluate_context(contexts[13], "');xss();//").executed

    def test_rawtext_contexts_need_end_tag(self, contexts):
        assert not evaluate_context(contexts[14], "<script>xss()</script>").executed
        assert evaluate_context(
            contexts[14], "</textarea><script>xss()</script>"
        ).executed
        assert evaluate_context(contexts[15], "</title><svg onload=xss()>").executed

    def test_comment_breakout(self, contexts):
        assert not evaluate_context(contexts[16], "<script>xss()</script>").executed
        assert evaluate_context(contexts[16], "--><script>xss()</script>").executed

    def test_template_literal_interpolation(self, contexts):
        assert evaluate_context(contexts[19], "${xss()}").executed


class TestEvaluate:
    def test_worked_polyglot_solves_fig1_trio(self, contexts, worked_polyglot):
        assert evaluate(contexts[0:3], worked_polyglot).bits == (1, 1, 1)

    def test_bare_sentinel_solves_nothing_in_trio(self, contexts):
        # hand trace: plain text in html-body, non-URI in iframe src,
        # string interior in the js context
        assert evaluate(contexts[0:3], "xss()").bits == (0, 0, 0)

    def test_empty_context_list(self):
        sv = evaluate([], "anything")
        assert sv.bits == () and sv.count == 0

    def test_counter_increments_once_per_call(self, contexts):
        tb = Testbed(contexts)
        tb.evaluate("xss()")
        tb.evaluate_subset("xss()", [0, 1])
        assert tb.calls == 2

    def test_purity_repeated_calls_agree(self, contexts, worked_polyglot):
        a = evaluate(contexts, worked_polyglot)
        b = evaluate(contexts, worked_polyglot)
        assert a.bits == b.bits

    @given(payload=payload_text)
    @settings(max_examples=40, deadline=None)
    def test_monotone_composition_subset_projection(self, payload):
        from polysynth.defaults import default_contexts

        contexts = list(default_contexts())
        full = evaluate(contexts, payload)
        subset_ids = [1, 4, 9, 20]
        sub = evaluate([contexts[i] for i in subset_ids], payload)
        assert sub.bits == tuple(full.bits[i] for i in subset_ids)

    @given(payload=payload_text)
    @settings(max_examples=40, deadline=None)
    def test_sentinel_necessity(self, payload):
        from polysynth.defaults import default_contexts

        contexts = list(default_contexts())
        if "xss()" in payload:
            return
        assert evaluate(contexts, payload).count == 0


class TestInnerHtmlSemantics:
    def test_script_vehicle_never_executes(self, contexts):
        ctx = contexts[7]
        assert ctx.mode == "innerhtml-value"
        assert not evaluate_context(ctx, "<script>xss()</script>").executed

    def test_event_handler_vehicle_executes(self, contexts):
        assert evaluate_context(contexts[7], "<svg onload=xss()>").executed
        assert evaluate_context(contexts[7], '<img src=x onerror="xss()">').executed

    def test_javascript_iframe_executes(self, contexts):
        assert evaluate_context(contexts[7], '<iframe src="javascript:xss()">').executed


class TestMutualExclusion:
    def test_fig4_pair_is_exclusive(self, contexts):
        assert mutually_exclusive(contexts, 3, 4) is True

    def test_identical_contexts_are_not_exclusive(self, contexts):
        dup = InjectionContext(
            id=27,
            name="anchor-dup",
            channel=Channel.HTML_BODY,
            template=contexts[0].template,
        )
        assert mutually_exclusive(list(contexts) + [dup], 0, 27) is False

    def test_attr_and_body_share_a_solution(self, contexts):
        assert mutually_exclusive(contexts, 9, 0) is False


class TestScoreVector:
    def test_count_and_or(self):
        a = ScoreVector((1, 0, 1))
        b = ScoreVector((0, 1, 1))
        assert a.count == 2
        assert (a | b).bits == (1, 1, 1)

    def test_roundtrip_01(self):
        sv = ScoreVector.from01("0101")
        assert sv.to01() == "0101"
        assert len(sv) == 4 and sv[1] == 1

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            ScoreVector((1,)) | ScoreVector((1, 0))
