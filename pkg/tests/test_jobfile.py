import pytest

from foliation_loci.errors import ParseError
from foliation_loci.jobfile import JobFile, parse_fraction, parse_job_text


def test_grammar_blocks_and_lists():
    text = """
    # comment
    chart { vars: [x, y]; ideal: [] }
    fields: [[1, 0],
             [0, (x + 1)/(y - 2)]]
    k: 2
    """
    d = parse_job_text(text)
    assert d == {"chart": {"vars": ["x", "y"], "ideal": []}, "fields": [["1", "0"], ["0", "(x + 1)/(y - 2)"]], "k": "2"}


@pytest.mark.parametrize("bad", [
    "chart { vars: [x]",
    "k: 1\nk: 2",
    "fields: [[1, 0]",
    "k 1",
    "k:",
    "= 3",
])
def test_grammar_errors(bad):
    with pytest.raises(ParseError):
        parse_job_text(bad)


def test_require_rejects_extras_and_missing():
    job = JobFile.parse("chart { vars: [x] }\nfields: [[1]]\nbogus: 3")
    with pytest.raises(ParseError):
        job.require(["chart", "fields"])
    with pytest.raises(ParseError):
        JobFile.parse("chart { vars: [x] }").require(["chart", "fields"])
    JobFile.parse("chart { vars: [x] }\nfields: [[1]]\nk: 3").require(["chart", "fields"])


def test_objects():
    job = JobFile.parse("chart { vars: [x, y] }\nfields: [[1, y]]\nvariety { ideal: [x*y] }\npoint: [1/2, -3]")
    f = job.foliation()
    assert f.n == 1
    assert job.variety(f.chart).text() == ["x*y"]
    assert [str(q) for q in job.point()] == ["1/2", "-3"]
    with pytest.raises(ParseError):
        JobFile.parse("chart { vars: [x, x] }\nfields: [[1, 0]]").foliation()
    with pytest.raises(ParseError):
        JobFile.parse("chart { vars: [x, y] }\nfields: [[1]]").foliation()
    with pytest.raises(ParseError):
        JobFile.parse("chart { vars: [x]; colour: [red] }\nfields: [[1]]").foliation()


def test_family_and_form():
    job = JobFile.parse("family { f: x^3 - lam; base: [lam] }\nform { num: x; pole: 3 }")
    fam = job.family()
    assert fam.genus == 1
    assert job.form(fam).pole == 3
    with pytest.raises(ParseError):
        JobFile.parse("family { f: x^3 - lam; base: [lam] }\nform { num: x; pole: three }").form(fam)


def test_fraction():
    assert str(parse_fraction(" -7/3 ")) == "-7/3"
    with pytest.raises(ParseError):
        parse_fraction("1.5")


def test_missing_file(tmp_path):
    with pytest.raises(ParseError):
        JobFile.load(str(tmp_path / "nope.job"))
