from confcalc.bench import benchmark_star


def test_rows_and_policy():
    rep = benchmark_star([6, 8, 20], repetitions=1)
    assert len(rep.rows) == 6
    by = {(r.sites, r.path): r for r in rep.rows}
    assert by[(8, "naive")].status == "ok"
    assert by[(8, "fast")].max_abs_diff <= 1e-12
    assert by[(20, "naive")].status == "skipped"
    assert by[(20, "fast")].status == "ok" and by[(20, "fast")].seconds > 0


def test_csv_shape():
    rep = benchmark_star([4, 5], repetitions=1)
    lines = rep.to_csv().splitlines()
    assert lines[0] == "sites,path,status,seconds,max_abs_diff"
    assert len(lines) == 5
    assert "seconds" not in rep.to_csv(timings=False)
