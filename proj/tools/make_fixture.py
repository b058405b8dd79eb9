#!/usr/bin/env python3
"""Writes the synthetic EVE alert fixture used by the golden pipeline test.

Three teams, four victims, two High-severity objectives. Output is a pure
function of --seed, so the committed fixture can be regenerated exactly.
"""
import argparse
import datetime as dt
import json
import random

TEAMS = ["10.0.254.201", "10.0.254.202", "10.0.254.203"]
VICTIMS = ["10.0.0.20", "10.0.0.21", "10.0.0.22", "10.0.0.23"]

# step name -> (signature, category, port)
STEPS = {
    "ping": ("GPL ICMP_INFO PING *NIX", "Misc activity", None),
    "portscan": ("ET SCAN Nmap Scripting Engine User-Agent Detected", "Web Application Attack", 80),
    "sshscan": ("ET SCAN Potential SSH Scan", "Attempted Information Leak", 22),
    "nikto": ("ET SCAN Nikto Web App Scan in Progress", "Web Application Attack", 80),
    "dirlist": ("ET WEB_SERVER Directory Listing", "Attempted Information Leak", 80),
    "brute": ("ET SCAN LibSSH Based Frequent SSH Connections Likely Brute Force", "Attempted Administrator Privilege Gain", 22),
    "sqli": ("ET WEB_SERVER Possible SQL Injection Attempt UNION SELECT", "Web Application Attack", 80),
    "rce": ("ET WEB_SERVER Possible Remote Code Execution via shell", "Attempted Administrator Privilege Gain", 80),
    "privesc": ("ET POLICY Linux Privilege Escalation attempt", "Attempted User Privilege Gain", 22),
    "c2": ("ET TROJAN Meterpreter Reverse Shell", "A Network Trojan was detected", 4444),
    "exfil": ("ET POLICY Possible Data Exfiltration over MySQL", "Potential Corporate Privacy Violation", 3306),
    "dos": ("ET DOS Possible HTTP Flood", "Attempted Denial of Service", 80),
}

# (team, victim, plan); a plan is a list of step names
CAMPAIGNS = [
    (0, 0, ["ping", "portscan", "nikto", "sqli", "privesc", "exfil", "c2", "privesc", "exfil"]),
    (0, 2, ["ping", "portscan", "nikto", "dos"]),
    (0, 1, ["ping", "sshscan", "brute"]),
    (1, 0, ["ping", "sshscan", "brute", "privesc", "exfil"]),
    (1, 2, ["portscan", "dirlist", "rce", "dos", "portscan", "dos"]),
    (1, 3, ["ping", "portscan", "dirlist"]),
    (2, 0, ["portscan", "nikto", "sqli", "rce", "privesc", "exfil"]),
    (2, 3, ["ping", "sshscan", "brute", "privesc"]),
    (2, 2, ["ping", "portscan", "dos"]),
]


def stamp(t):
    return t.strftime("%Y-%m-%dT%H:%M:%S.%f") + "+0000"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=2018)
    ap.add_argument("--out", required=True)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    start = dt.datetime(2018, 11, 3, 14, 0, 0)
    records = []
    for team, victim, plan in CAMPAIGNS:
        t = start + dt.timedelta(seconds=rng.randint(0, 3600))
        for step in plan:
            sig, cat, port = STEPS[step]
            for _ in range(rng.randint(2, 7)):
                rec = {
                    "timestamp": stamp(t),
                    "event_type": "alert",
                    "src_ip": TEAMS[team],
                    "dest_ip": VICTIMS[victim],
                    "proto": "ICMP" if port is None else "TCP",
                    "alert": {"signature": sig, "category": cat, "severity": 2},
                }
                if port is not None:
                    rec["dest_port"] = port
                records.append(rec)
                # some bursts land inside the duplicate window
                t += dt.timedelta(seconds=rng.choice([0.3, 0.6, 2.0, 5.0, 12.0, 40.0]))
            t += dt.timedelta(seconds=rng.randint(400, 2400))
    records.sort(key=lambda r: (r["timestamp"], r["src_ip"], r["dest_ip"], r["alert"]["signature"]))

    lines = [json.dumps(r, sort_keys=True) for r in records]
    # one non-alert event and one damaged record exercise the skip paths
    lines.insert(10, json.dumps({"timestamp": stamp(start), "event_type": "flow", "src_ip": TEAMS[0],
                                 "dest_ip": VICTIMS[0]}, sort_keys=True))
    lines.insert(50, lines[49][: len(lines[49]) // 2])
    with open(args.out, "w") as f:
        f.write("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
