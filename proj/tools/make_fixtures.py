#!/usr/bin/env python3
"""Regenerates fixtures/ deterministically. Run from the repo root."""
import datetime as dt
import json
import math
import os
import random

ROOT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "fixtures")
REF = dt.date(2023, 4, 15)
HIST_START = dt.date(2023, 1, 1)
HIST_END = REF + dt.timedelta(days=7)

SITES = {
    "Doha": (25.2854, 51.5310),
    "Kuwait City": (29.3759, 47.9774),
    "Abu Dhabi": (24.4539, 54.3773),
    "Dubai": (25.2048, 55.2708),
    "Al Ain": (24.2075, 55.7447),
    "Manama": (26.2285, 50.5860),
    "Muscat": (23.5880, 58.3829),
    "Riyadh": (24.7136, 46.6753),
}


def write(rel, text):
    path = os.path.join(ROOT, rel)
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)


def days(a, b):
    d = a
    while d <= b:
        yield d
        d += dt.timedelta(days=1)


def r1(x):
    return f"{x:.1f}"


# ---- point datasets -------------------------------------------------------

def temperature(site_idx, d):
    n = (d - HIST_START).days
    return 17.0 + site_idx * 0.6 + 0.12 * n + 1.5 * math.sin(0.7 * n + site_idx)


def precipitation(name, d):
    if name == "Doha" and d == REF:
        return 12.0
    rng = random.Random(f"rain-{name}-{d.isoformat()}")
    return round(rng.uniform(2.0, 9.0), 1) if rng.random() < 0.06 else 0.0


def weather_csv():
    rows = ["lat,lon,date,variable,value,unit"]
    for k, (name, (lat, lon)) in enumerate(SITES.items()):
        for d in days(HIST_START, HIST_END):
            rows.append(f"{lat},{lon},{d},temperature,{r1(temperature(k, d))},°C")
            rows.append(f"{lat},{lon},{d},precipitation,{r1(precipitation(name, d))},mm")
            wind = 12.0 + 6.0 * abs(math.sin(0.3 * (d - HIST_START).days + k))
            rows.append(f"{lat},{lon},{d},wind_speed,{r1(wind)},km/h")
            rh = 45.0 + 20.0 * math.cos(0.2 * (d - HIST_START).days + k)
            rows.append(f"{lat},{lon},{d},relative_humidity,{r1(rh)},%")
    return "\n".join(rows) + "\n"


def rain_csv():
    rows = ["lat,lon,date,variable,value,unit"]
    for name, (lat, lon) in SITES.items():
        for d in days(HIST_START, HIST_END):
            rows.append(f"{lat},{lon},{d},precipitation,{r1(precipitation(name, d))},mm")
    return "\n".join(rows) + "\n"


def aqi_value(name, d):
    if name == "Kuwait City" and d == REF:
        return 87
    rng = random.Random(f"aqi-{name}-{d.isoformat()}")
    return rng.randint(45, 140)


def aqi_csv():
    rows = ["lat,lon,date,variable,value,unit"]
    for name, (lat, lon) in SITES.items():
        for d in days(HIST_START, REF + dt.timedelta(days=5)):
            a = aqi_value(name, d)
            rows.append(f"{lat},{lon},{d},aqi,{a},USAQI")
            rows.append(f"{lat},{lon},{d},pm2_5,{r1(a * 0.35)},µg/m³")
            rows.append(f"{lat},{lon},{d},pm10,{r1(a * 1.1)},µg/m³")
            rows.append(f"{lat},{lon},{d},no2,{r1(18 + a * 0.1)},µg/m³")
            rows.append(f"{lat},{lon},{d},o3,{r1(60 + a * 0.2)},µg/m³")
    return "\n".join(rows) + "\n"


def uv_csv():
    rows = ["lat,lon,date,variable,value,unit"]
    for k, (name, (lat, lon)) in enumerate(SITES.items()):
        for d in days(HIST_START, HIST_END):
            uv = 6.0 + 0.04 * (d - HIST_START).days + 0.3 * math.sin(d.toordinal() + k)
            rows.append(f"{lat},{lon},{d},uv_index,{r1(uv)},1")
    return "\n".join(rows) + "\n"


def pollen_csv():
    rows = ["lat,lon,date,variable,value,unit"]
    for k, (name, (lat, lon)) in enumerate(SITES.items()):
        for d in days(HIST_START, REF + dt.timedelta(days=4)):
            p = 10 + (d.toordinal() * 7 + k * 3) % 25
            rows.append(f"{lat},{lon},{d},pollen,{p},grains/m³")
    return "\n".join(rows) + "\n"


# ---- gridded products -----------------------------------------------------

def grid_header(source, lats, lons, res, start, steps, mask=None):
    out = [
        "gridded-fixture v1",
        f"source {source}",
        "lats " + " ".join(f"{v:g}" for v in lats),
        "lons " + " ".join(f"{v:g}" for v in lons),
        f"resolution {res:g}",
        f"start {start}T00:00:00Z",
        "cadence_seconds 86400",
        f"steps {steps}",
    ]
    if mask is not None:
        out.append("mask " + " ".join(str(m) for m in mask))
    return out


def discharge_grid():
    lats = [float(v) for v in range(23, 31)]
    lons = [float(v) for v in range(46, 59)]
    start = dt.date(2023, 3, 1)
    steps = (HIST_END - start).days + 1
    river = {(2, 5), (3, 5), (4, 6), (6, 1), (1, 9)}
    mask = [1 if (i, j) in river else 0 for i in range(len(lats)) for j in range(len(lons))]
    lines = grid_header("glofas-fixture", lats, lons, 1.0, start, steps, mask)
    lines.append("variable discharge m³/s")
    for s in range(steps):
        row = []
        for i in range(len(lats)):
            for j in range(len(lons)):
                row.append(f"{(40 + 3 * i + 2 * j + 5 * math.sin(s / 6.0 + i)):.2f}" if (i, j) in river else "0")
        lines.append(" ".join(row))
    return "\n".join(lines) + "\n"


def visual_grid():
    lats = [24.0, 25.0, 26.0, 27.0]
    lons = [50.0, 51.0, 52.0, 53.0, 54.0, 55.0, 56.0]
    start = dt.date(2013, 1, 1)
    end = dt.date(2022, 12, 31)
    steps = (end - start).days + 1
    lines = grid_header("era5-fixture", lats, lons, 1.0, start, steps)
    lines.append("variable temperature K")
    rng = random.Random(2024)
    # Doha's nearest node is (25, 52); a 50-day outage in mid 2022 sinks one window below coverage.
    gap = range(3426, 3476)
    for s in range(steps):
        row = []
        for i in range(len(lats)):
            for j in range(len(lons)):
                if (i, j) == (1, 2) and s in gap:
                    row.append("NA")
                    continue
                season = 9.0 * math.sin(2 * math.pi * (s - 110) / 365.25)
                v = 273.15 + 27.0 - 0.8 * i + 0.2 * j + season + 0.0004 * s + rng.gauss(0, 0.8)
                row.append(f"{v:.2f}")
        lines.append(" ".join(row))
    return "\n".join(lines) + "\n"


# ---- imagery ---------------------------------------------------------------

def raster(acquired, lat, lon, bands):
    lines = ["raster v1", "width 8", "height 8", "pixel_size_m 10", f"acquired {acquired}T07:00:00Z",
             f"lat {lat}", f"lon {lon}"]
    for name in ("red", "green", "blue", "nir"):
        lines.append(f"band {name}")
        for r in range(8):
            lines.append(" ".join(f"{bands[name][r][c]:.3f}" for c in range(8)))
    return "\n".join(lines) + "\n"


def scene(seed, vegetation, water_cols=()):
    rng = random.Random(seed)
    b = {k: [[0.0] * 8 for _ in range(8)] for k in ("red", "green", "blue", "nir")}
    for r in range(8):
        for c in range(8):
            v = vegetation(r, c)
            red = 0.30 - 0.18 * v + rng.uniform(-0.01, 0.01)
            nir = 0.32 + 0.30 * v + rng.uniform(-0.01, 0.01)
            green = 0.22 + rng.uniform(-0.01, 0.01)
            if c in water_cols:
                green, nir = 0.30, 0.05
            b["red"][r][c], b["nir"][r][c], b["green"][r][c] = red, nir, green
            b["blue"][r][c] = 0.15 + rng.uniform(-0.01, 0.01)
    return b


def ndvi_mean(b):
    vals = []
    for r in range(8):
        for c in range(8):
            nir, red = round(b["nir"][r][c], 3), round(b["red"][r][c], 3)
            vals.append((nir - red) / (nir + red))
    return sum(vals) / len(vals)


# ---- text corpus -------------------------------------------------------------

HEAT_HTML = """<!DOCTYPE html>
<html lang="en">
<head>
<title>Extreme heat and public health in Doha</title>
<meta property="og:site_name" content="Ministry of Public Health">
<meta name="date" content="2023-09-05">
<link rel="canonical" href="https://www.moph.gov.qa/heat-health-2023">
</head>
<body>
<nav><a href="/">Home</a> <a href="/news">News</a> <a href="/contact">Contact us</a></nav>
<header><p>Ministry of Public Health | State of Qatar</p></header>
<article>
<h1>Extreme heat and public health in Doha</h1>
<p>The Ministry of Public Health issued 14 heat-stress advisories for Doha in summer 2023. Each advisory was
triggered when the forecast heat index exceeded the national threshold for two consecutive days.</p>
<h2>Working hours</h2>
<p>Outdoor work in Qatar is banned between 10:00 and 15:30 from June 1 to September 15. Employers must provide
shaded rest areas and cool drinking water at every outdoor site.</p>
<h2>Hospital admissions</h2>
<p>Heat illness admissions rose in July, and emergency visits doubled in August. Clinicians recorded most cases
among outdoor labourers and older residents living alone.</p>
<p><a href="/share">Share this page</a> <a href="/print">Print</a></p>
</article>
<aside><p>Related: Ramadan health tips</p></aside>
<footer><p>Copyright 2023 Ministry of Public Health</p></footer>
</body>
</html>
"""

COAST_HTML = """<html><head>
<title>Coastal flooding and sea level rise risk in Doha</title>
<meta name="author" content="Ministry of Municipality">
<meta name="citation_publication_date" content="2022/11/20">
</head><body>
<nav><ul><li><a href="/">Home</a></li><li><a href="/projects">Projects</a></li></ul></nav>
<main>
<h2>Sea level projections</h2>
<p>Sea level along the Doha coastline could rise by 0.5 metres by 2100 under a high-emissions scenario.
Storm surge on top of that rise would flood low-lying districts several times per decade.</p>
<h2>Exposure</h2>
<p>About 18 percent of Doha's urban area lies less than 5 metres above sea level. The exposed land includes
parts of the corniche, the port and newly reclaimed islands.</p>
</main>
<footer>Terms | Privacy</footer>
</body></html>
"""


def nccap_pdf():
    header = "Qatar National Climate Change Action Plan"
    pages = []
    pages.append([
        "Title: Qatar National Climate Change Action Plan 2030",
        "Organization: Ministry of Environment and Climate Change",
        "Date: 2021-10-25",
        "",
        header,
        "",
        "1 Introduction",
        "",
        "Qatar's National Climate Change Action Plan targets a 25 percent cut in greenhouse gas emissions by",
        "2030. The target is measured against a business-as-usual baseline that assumes current growth in",
        "population, industry and energy demand continues without new policy.",
        "",
        "The plan lists 35 mitigation measures and 38 adaptation measures. Measures are grouped by sector and",
        "each carries a lead agency, a timeline and an indicator that is reported to the ministry every year.",
        "",
        "1",
    ])
    sectors = [
        ("energy", "Power generation moves toward solar capacity and more efficient gas turbines, while the grid operator expands demand response programmes for large commercial buildings during summer peaks."),
        ("industry", "Industrial facilities report emissions through a monitoring system and adopt carbon capture where it is technically feasible at gas processing plants and fertiliser works."),
        ("transport", "Public transport ridership grows through metro and electric bus services, and fuel economy standards apply to newly registered light vehicles from the middle of the decade."),
        ("buildings", "Building codes tighten insulation and cooling efficiency requirements, and district cooling networks replace individual air conditioning units in new developments."),
        ("water", "Desalination plants adopt energy recovery devices, and treated wastewater replaces groundwater for landscape irrigation across municipal parks and road verges."),
        ("waste", "Landfill methane is captured at the main disposal site, and municipal recycling targets rise in steps with new sorting facilities in each municipality."),
    ]
    body = [header, "", "2 Mitigation Measures", ""]
    for name, text in sectors:
        body.append(f"Measures in the {name} sector are coordinated by a standing committee. {text} Progress in the {name} sector is reviewed each year against the indicator set agreed for the plan.")
        body.append("")
    body.append("2")
    pages.append(body)
    adapt = [header, "", "3 Adaptation Measures", ""]
    adapt_text = [
        "The plan assigns coastal protection to the Ministry of Municipality. Priority works include seawalls, beach nourishment and the restoration of mangrove stands that absorb wave energy along the northern shore.",
        "Heat health action planning is led by the Ministry of Public Health, which maintains an early warning service and publishes guidance for employers, schools and care homes during extreme heat events.",
        "Food security measures protect strategic reserves and diversify import routes, while controlled environment agriculture reduces the water footprint of domestic vegetable production.",
        "Biodiversity measures expand protected areas, monitor migratory birds at coastal wetlands and limit off-road driving in sensitive desert habitats that recover slowly after disturbance.",
        "Water security measures extend storage capacity so that the network can supply several days of demand if desalination output is interrupted by algal blooms or oil spills in the Gulf.",
        "Urban planning measures add shade, green corridors and cool pavements to reduce heat exposure in dense neighbourhoods where outdoor workers and pedestrians spend long hours in the sun.",
        "Research programmes fund regional climate projections at high resolution, studies of dust storm frequency and assessments of groundwater salinity in agricultural areas of the north.",
    ]
    for t in adapt_text:
        adapt.append(t)
        adapt.append("")
    adapt.append("3")
    pages.append(adapt)
    return "\f".join("\n".join(p) for p in pages) + "\n"


FACTS = {
    "doc-1#0": [
        "The Ministry of Public Health issued 14 heat-stress advisories for Doha in summer 2023.",
        "Outdoor work in Qatar is banned between 10:00 and 15:30 from June 1 to September 15.",
        "Heat illness admissions rose in July, and emergency visits doubled in August.",
    ],
    "doc-2#0": [
        "Qatar's National Climate Change Action Plan targets a 25 percent cut in greenhouse gas emissions by 2030.",
        "The plan lists 35 mitigation measures and 38 adaptation measures.",
    ],
    "doc-2#1": [
        "The plan assigns coastal protection to the Ministry of Municipality.",
        {"statement": "Mangrove stands absorb wave energy along the northern shore.", "chunk_ref": "doc-9#0"},
    ],
    "doc-3#0": [
        "Sea level along the Doha coastline could rise by 0.5 metres by 2100 under a high-emissions scenario.",
        "About 18 percent of Doha's urban area lies less than 5 metres above sea level.",
    ],
}

# statement -> (mcq, open, tf list)
QA = {
    FACTS["doc-1#0"][0]: (
        {"question": "How many heat-stress advisories did the Ministry of Public Health issue for Doha in summer 2023?",
         "answer": "14", "options": ["4", "14", "24", "40"]},
        {"question": "How many heat-stress advisories were issued for Doha in summer 2023?", "answer": "14 advisories"},
        [{"question": "The Ministry of Public Health issued 14 heat-stress advisories for Doha in summer 2023.", "answer": True},
         {"question": "The Ministry of Public Health issued no heat-stress advisories for Doha in summer 2023.", "answer": False}],
    ),
    FACTS["doc-1#0"][1]: (
        {"question": "When does Qatar's summer ban on outdoor work start each day?",
         "answer": "10:00", "options": ["08:00", "10:00", "12:00", "15:30"]},
        {"question": "Between which dates does Qatar ban midday outdoor work?", "answer": "From June 1 to September 15"},
        [{"question": "Qatar bans outdoor work between 10:00 and 15:30 from June 1 to September 15.", "answer": True}],
    ),
    FACTS["doc-2#0"][0]: (
        {"question": "By how much does Qatar's National Climate Change Action Plan aim to cut greenhouse gas emissions by 2030?",
         "answer": "25 percent", "options": ["10 percent", "25 percent", "50 percent", "75 percent"]},
        {"question": "What emissions target does Qatar's National Climate Change Action Plan set for 2030?",
         "answer": "A 25 percent cut in greenhouse gas emissions"},
        [{"question": "Qatar's action plan targets a 25 percent emissions cut by 2030.", "answer": True},
         {"question": "Qatar's action plan targets a 60 percent emissions cut by 2030.", "answer": False}],
    ),
    FACTS["doc-2#0"][1]: (
        {"question": "How many adaptation measures does Qatar's action plan list?",
         "answer": "38", "options": ["35", "36", "37"]},
        {"question": "How many mitigation measures does Qatar's action plan list?", "answer": "35"},
        [{"question": "Qatar's action plan lists 38 adaptation measures.", "answer": True},
         {"question": "Qatar's action plan lists 12 adaptation measures.", "answer": False}],
    ),
    FACTS["doc-2#1"][0]: (
        {"question": "Which body does Qatar's action plan assign to coastal protection?",
         "answer": "Ministry of Municipality",
         "options": ["Ministry of Municipality", "Ministry of Public Health", "Ministry of Finance"]},
        {"question": "Who is responsible for coastal protection under Qatar's action plan?", "answer": "The Ministry of Municipality"},
        [{"question": "Coastal protection is assigned to the Ministry of Municipality.", "answer": True},
         {"question": "Coastal protection is assigned to the Ministry of Public Health.", "answer": False}],
    ),
    FACTS["doc-3#0"][0]: (
        {"question": "How much could sea level rise along the Doha coastline by 2100 under a high-emissions scenario?",
         "answer": "0.5 metres", "options": ["0.1 metres", "0.5 metres", "2 metres", "5 metres"]},
        {"question": "What sea level rise is projected for Doha's coast by 2100 under high emissions?", "answer": "About 0.5 metres"},
        [{"question": "Sea level at Doha could rise by 0.5 metres by 2100 under high emissions.", "answer": True},
         {"question": "Sea level at Doha is projected to fall by 2100 under high emissions.", "answer": False}],
    ),
    FACTS["doc-3#0"][1]: (
        {"question": "What share of Doha's urban area lies less than 5 metres above sea level?",
         "answer": "About 18 percent", "options": ["About 3 percent", "About 18 percent", "About 45 percent", "About 70 percent"]},
        {"question": "What fraction of Doha's urban area is below 5 metres elevation?", "answer": "About 18 percent"},
        [{"question": "About 18 percent of Doha's urban area lies below 5 metres above sea level.", "answer": True},
         {"question": "Most of Doha's urban area lies below 5 metres above sea level.", "answer": False}],
    ),
}


def text_fixtures():
    write("pages/heat.html", HEAT_HTML)
    write("pages/coast.html", COAST_HTML)
    write("pages/nccap.txt", nccap_pdf())
    write("pages/index.csv", "url,file,kind\n"
          "https://www.moph.gov.qa/heat-health-2023,heat.html,html\n"
          "https://www.mecc.gov.qa/nccap-2030.pdf,nccap.txt,pdf_text\n"
          "https://www.mme.gov.qa/coastal-risk,coast.html,html\n"
          "https://travel.example.com/doha-hotels,coast.html,html\n")
    search = [
        {"query": "Doha extreme heat public health", "results": [
            {"title": "Extreme heat and public health in Doha", "url": "https://www.moph.gov.qa/heat-health-2023",
             "snippet": "Heat-stress advisories, outdoor work limits and hospital admissions."},
            {"title": "Doha weather today", "url": "https://weather.example.com/doha", "snippet": "Sunny, 31 degrees."}]},
        {"query": "Qatar national climate change action plan", "results": [
            {"title": "Qatar National Climate Change Action Plan 2030", "url": "https://www.mecc.gov.qa/nccap-2030.pdf",
             "snippet": "Mitigation and adaptation measures to 2030."}]},
        {"query": "Doha coastal flooding sea level rise", "results": [
            {"title": "Best beach hotels in Doha", "url": "https://travel.example.com/doha-hotels",
             "snippet": "Book a seaside stay with breakfast included."}]},
        {"query": "Doha sea level rise coastal flooding assessment", "results": [
            {"title": "Coastal flooding and sea level rise risk in Doha", "url": "https://www.mme.gov.qa/coastal-risk",
             "snippet": "Projections and exposure of low-lying districts."}]},
        {"query": "Qatar heat action plan", "results": [
            {"title": "Extreme heat and public health in Doha", "url": "https://www.moph.gov.qa/heat-health-2023",
             "snippet": "Qatar heat action: advisories and outdoor work limits."}]},
    ]
    write("search.jsonl", "".join(json.dumps(s, ensure_ascii=False) + "\n" for s in search))

    scripts = [
        {"channel": "keywords", "emissions": [
            json.dumps(["Doha extreme heat public health", "doha EXTREME heat public health",
                        "Qatar national climate change action plan", "Doha coastal flooding sea level rise"]),
            json.dumps(["Abu Dhabi mangrove restoration carbon", "Qatar national climate action plan change"]),
        ]},
        {"channel": "refine", "match": "Doha coastal flooding sea level rise",
         "emissions": ["Doha sea level rise coastal flooding assessment"]},
        {"channel": "refine", "match": "Abu Dhabi mangrove restoration carbon",
         "emissions": ["Abu Dhabi mangrove blue carbon study"], "repeat_last": True},
    ]
    for chunk, facts in FACTS.items():
        scripts.append({"channel": "facts", "match": f"Chunk {chunk}", "emissions": [json.dumps(facts)]})
    for statement, (mcq, open_, tf) in QA.items():
        for fmt, payload in (("mcq", mcq), ("open", open_), ("tf", tf)):
            scripts.append({"channel": "qa", "match": f"Format: {fmt}\nEvidence:\n- {statement}",
                            "emissions": [json.dumps(payload)]})
    write("replays/text.json", json.dumps({"format": "scripted-replay/1", "scripts": scripts}, indent=1,
                                          ensure_ascii=False) + "\n")


def visual_replay():
    items = {
        ("forecasting", "mcq"): {"question": "Given the trend in this window, where is the next 30-day mean most likely to sit relative to the window mean?",
                                 "answer": "Above the window mean", "options": ["Above the window mean", "Below the window mean", "Equal to the window minimum"]},
        ("forecasting", "open"): {"question": "Describe the likely direction of the series over the 30 days after this window.",
                                  "answer": "It continues in the direction of the fitted trend."},
        ("forecasting", "tf"): [{"question": "The fitted trend is a reasonable first guess for the next 30 days.", "answer": True},
                                {"question": "The next 30 days must repeat the window minimum every day.", "answer": False}],
        ("reasoning", "mcq"): {"question": "Which statistic in the chart metadata describes the spread of values in this window?",
                               "answer": "Standard deviation", "options": ["Standard deviation", "Latitude", "Window index"]},
        ("reasoning", "open"): {"question": "What does the slope in the metadata tell you about this window?",
                                "answer": "The average change in value per day across the window."},
        ("reasoning", "tf"): [{"question": "The window maximum is at least as large as the window mean.", "answer": True},
                              {"question": "The window minimum exceeds the window maximum.", "answer": False}],
    }
    scripts = []
    for (cat, fmt), payload in items.items():
        scripts.append({"channel": "visual_qa", "match": f"Category: {cat}\nFormat: {fmt}",
                        "emissions": [json.dumps(payload)], "repeat_last": True})
    write("replays/visual.json", json.dumps({"format": "scripted-replay/1", "scripts": scripts}, indent=1) + "\n")


def call_block(tool, args):
    return "```tool_call\n" + json.dumps({"tool": tool, "args": args}) + "\n```"


def agent_replays():
    lat, lon = SITES["Doha"]
    q = "How much rain fell in Doha on 2023-04-15?"
    steps = [call_block("geocode_mapping", {"region": "Doha"}),
             call_block("rain_inquiry", {"lat": f"{lat}", "lon": f"{lon:.4f}", "date": "2023-04-15"})]
    good = steps + ["Doha received 12.0 mm of rain on 2023-04-15 [2]."]
    bad = steps + ["Doha received 17.5 mm of rain on 2023-04-15 [2]."]
    for name, emissions in (("doha_rain", good), ("ungrounded_probe", bad)):
        doc = {"format": "scripted-replay/1", "scripts": [
            {"channel": "route", "match": q, "emissions": [json.dumps({"intent": "numerical"})]},
            {"channel": "agent", "match": q, "emissions": emissions}]}
        write(f"replays/{name}.json", json.dumps(doc, indent=1) + "\n")


def bench(alain_ndvi):
    d, k = SITES["Doha"], SITES["Kuwait City"]
    a = SITES["Al Ain"]
    forecast_day1 = round(temperature(0, REF + dt.timedelta(days=1)), 1)
    inst = [
        {"id": "b01", "query": "How much rain fell in Doha on 2023-04-15?",
         "allowed_tools": ["geocode_mapping", "rain_inquiry", "rain_analysis", "weather_inquiry"],
         "gold_trace": [
             {"tool": "geocode_mapping", "arg_names": ["region"], "arg_values": {"region": "Doha"},
              "summary_facts": [{"label": "Doha", "value": d[0], "tolerance": 1e-4}]},
             {"tool": "rain_inquiry", "arg_names": ["date", "lat", "lon"],
              "arg_values": {"lat": str(d[0]), "lon": f"{d[1]:.4f}", "date": "2023-04-15"},
              "summary_facts": [{"label": "mm", "value": 12.0}]}],
         "answer_facts": [{"label": "mm", "value": 12.0}], "requires_chart": False},
        {"id": "b02", "query": "What was the air quality index in Kuwait City on 2023-04-15?",
         "allowed_tools": ["geocode_mapping", "aqi_inquiry", "aqi_prediction"],
         "gold_trace": [
             {"tool": "geocode_mapping", "arg_names": ["region"], "arg_values": {"region": "Kuwait City"},
              "summary_facts": [{"label": "Kuwait City", "value": k[0], "tolerance": 1e-4}]},
             {"tool": "aqi_inquiry", "arg_names": ["date", "lat", "lon"],
              "arg_values": {"lat": str(k[0]), "lon": str(k[1]), "date": "2023-04-15"},
              "summary_facts": [{"label": "AQI", "value": 87}]}],
         "answer_facts": [{"label": "AQI", "value": 87}], "requires_chart": False},
        {"id": "b03", "query": "Estimate the annual emissions of a Qatari cement producer with revenue 1000000 in 2023.",
         "allowed_tools": ["carbon_footprint_calculation"],
         "gold_trace": [
             {"tool": "carbon_footprint_calculation", "arg_names": ["country", "industry", "revenue", "year"],
              "arg_values": {"country": "Qatar", "industry": "cement", "year": "2023", "revenue": "1000000"},
              "summary_facts": [{"label": "tCO2e", "value": 500000}]}],
         "answer_facts": [{"label": "tCO2e", "value": 500000}], "requires_chart": False},
        {"id": "b04", "query": "What was the mean NDVI around Al Ain (24.2075, 55.7447) on 2023-04-15?",
         "allowed_tools": ["get_satellite_image", "calculate_ndvi", "calculate_ndwi"],
         "gold_trace": [
             {"tool": "get_satellite_image", "arg_names": ["date", "lat", "lon"],
              "arg_values": {"lat": str(a[0]), "lon": str(a[1]), "date": "2023-04-15"},
              "summary_facts": [{"label": "img:alain_2023-04-15"}]},
             {"tool": "calculate_ndvi", "arg_names": ["image"], "arg_values": {"image": "img:alain_2023-04-15"},
              "summary_facts": [{"label": "NDVI", "value": alain_ndvi, "tolerance": 1e-3}]}],
         "answer_facts": [{"label": "NDVI", "value": alain_ndvi, "tolerance": 1e-3}], "requires_chart": False},
        {"id": "b05", "query": "Chart the temperature forecast for Doha (25.2854, 51.5310) over the next 3 days.",
         "allowed_tools": ["weather_forecast", "weather_analysis"],
         "gold_trace": [
             {"tool": "weather_forecast", "arg_names": ["days", "lat", "lon"],
              "arg_values": {"lat": str(d[0]), "lon": f"{d[1]:.4f}", "days": "3"},
              "summary_facts": [{"label": "temperature", "value": forecast_day1}]}],
         "answer_facts": [{"label": "temperature", "value": forecast_day1}],
         "requires_chart": True, "chart_variable": "temperature"},
    ]
    write("bench/instances.jsonl", "".join(json.dumps(i) + "\n" for i in inst))


def main():
    write("fixture.json", json.dumps({
        "format": "fixture-root/1",
        "reference_date": REF.isoformat(),
        "site_radius_km": 25,
        "cities": "../config/gulf_cities.csv",
        "emission_factors": "../config/emission_factors.csv",
        "observations": {
            "weather": {"csv": "observations/weather.csv", "max_horizon": 7},
            "rain": {"csv": "observations/rain.csv", "max_horizon": 7},
            "aqi": {"csv": "observations/aqi.csv", "max_horizon": 5},
            "uv": {"csv": "observations/uv.csv", "max_horizon": 7},
            "pollen": {"csv": "observations/pollen.csv", "max_horizon": 4},
            "discharge": {"grid": "observations/discharge.grid", "variable": "discharge", "max_horizon": 7},
        },
        "imagery": {"index": "imagery/index.csv", "dir": "imagery"},
        "search": "search.jsonl",
        "birds": "biodiversity/birds.csv",
        "species": "biodiversity/species.csv",
        "pages": "pages",
    }, indent=1) + "\n")
    write("observations/weather.csv", weather_csv())
    write("observations/rain.csv", rain_csv())
    write("observations/aqi.csv", aqi_csv())
    write("observations/uv.csv", uv_csv())
    write("observations/pollen.csv", pollen_csv())
    write("observations/discharge.grid", discharge_grid())
    write("visual/gulf_t2m.grid", visual_grid())

    a = SITES["Al Ain"]
    green = scene(1, lambda r, c: 0.9 if c < 6 else 0.5)
    dry = scene(2, lambda r, c: 0.9 if c < 3 else 0.15)
    doha = scene(3, lambda r, c: 0.3, water_cols=(6, 7))
    write("imagery/alain_2020-04-15.raster", raster("2020-04-15", a[0], a[1], green))
    write("imagery/alain_2023-04-15.raster", raster("2023-04-15", a[0], a[1], dry))
    dl = SITES["Doha"]
    write("imagery/doha_2023-04-15.raster", raster("2023-04-15", dl[0], dl[1], doha))
    write("imagery/index.csv", "lat,lon,date,image_id\n"
          f"{a[0]},{a[1]},2020-04-15,alain_2020-04-15\n"
          f"{a[0]},{a[1]},2023-04-15,alain_2023-04-15\n"
          f"{dl[0]},{dl[1]},2023-04-15,doha_2023-04-15\n")
    write("biodiversity/birds.csv", "ref,species,confidence\n"
          "audio:mangrove_dawn_01,Upupa epops,0.82\n"
          "audio:mangrove_dawn_01,Ardea cinerea,0.11\n"
          "audio:desert_03,Ammomanes deserti,0.74\n")
    write("biodiversity/species.csv", "ref,species,confidence\n"
          "img:alain_2023-04-15,Prosopis cineraria,0.64\n"
          "img:alain_2023-04-15,Calotropis procera,0.21\n"
          "img:doha_2023-04-15,Avicennia marina,0.77\n")
    text_fixtures()
    visual_replay()
    agent_replays()
    bench(round(ndvi_mean(dry), 4))

    write("run_config.json", json.dumps({
        "format": "run-config/1",
        "backend": {"kind": "scripted", "replay": "replays/doha_rain.json"},
        "providers": {"mode": "fixture", "fixture_root": "."},
        "output_dir": "out",
        "seed": 7,
        "agent": {"budget": 8},
        "text": {"seeds": ["extreme heat", "climate policy", "coastal flooding"],
                 "places": ["Qatar/Doha", "UAE/Abu Dhabi"], "tau": 0.85, "formats": ["mcq", "open", "tf"]},
        "visual": {"product": "visual/gulf_t2m.grid", "cities": ["Doha, Qatar", "Abu Dhabi, UAE"],
                   "window_limit": 4, "rho": 0.8},
    }, indent=1) + "\n")


if __name__ == "__main__":
    main()
