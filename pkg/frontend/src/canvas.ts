// Pan/zoom canvas for the abstract km plane; draws depot, customers, and
// route polylines. Instances are synthetic, so no map tiles, just geometry.

import type { InstanceDoc } from "./types.js";
import type { RoutePolyline } from "./views.js";

export class RouteCanvas {
  private ctx: CanvasRenderingContext2D;
  private scale = 8;
  private offsetX = 0;
  private offsetY = 0;
  private dragging = false;
  private lastX = 0;
  private lastY = 0;
  private instance: InstanceDoc | null = null;
  private polylines: RoutePolyline[] = [];

  constructor(private canvas: HTMLCanvasElement) {
    const ctx = canvas.getContext("2d");
    if (!ctx) throw new Error("canvas 2d context unavailable");
    this.ctx = ctx;
    this.offsetX = canvas.width / 2;
    this.offsetY = canvas.height / 2;
    canvas.addEventListener("wheel", (e) => {
      e.preventDefault();
      const factor = e.deltaY < 0 ? 1.15 : 1 / 1.15;
      this.scale = Math.min(200, Math.max(0.5, this.scale * factor));
      this.draw();
    });
    canvas.addEventListener("mousedown", (e) => {
      this.dragging = true;
      this.lastX = e.offsetX;
      this.lastY = e.offsetY;
    });
    canvas.addEventListener("mousemove", (e) => {
      if (!this.dragging) return;
      this.offsetX += e.offsetX - this.lastX;
      this.offsetY += e.offsetY - this.lastY;
      this.lastX = e.offsetX;
      this.lastY = e.offsetY;
      this.draw();
    });
    window.addEventListener("mouseup", () => {
      this.dragging = false;
    });
  }

  show(instance: InstanceDoc, polylines: RoutePolyline[]) {
    this.instance = instance;
    this.polylines = polylines;
    this.draw();
  }

  private toPx([x, y]: [number, number]): [number, number] {
    return [this.offsetX + x * this.scale, this.offsetY - y * this.scale];
  }

  draw() {
    const { ctx, canvas } = this;
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    if (!this.instance) return;
    for (const line of this.polylines) {
      ctx.strokeStyle = line.color;
      ctx.lineWidth = 2;
      ctx.beginPath();
      line.points.forEach((p, i) => {
        const [px, py] = this.toPx(p);
        if (i === 0) ctx.moveTo(px, py);
        else ctx.lineTo(px, py);
      });
      ctx.stroke();
    }
    this.instance.coords.forEach((p, i) => {
      const [px, py] = this.toPx(p as [number, number]);
      ctx.fillStyle = i === 0 ? "#000" : "#444";
      ctx.beginPath();
      ctx.arc(px, py, i === 0 ? 6 : 4, 0, 2 * Math.PI);
      ctx.fill();
      ctx.fillStyle = "#111";
      ctx.font = "11px sans-serif";
      ctx.fillText(i === 0 ? "depot" : String(i), px + 7, py - 7);
    });
  }
}
